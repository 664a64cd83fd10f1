//! Exhaustive pass over `P^4(F_p)` in z-space.
//!
//! One pass yields everything the pipeline needs from enumeration: the number
//! of points of `X'`, the rank-deficient locus of `L(z)`, and the singular
//! points of `X~` sitting over it. Work is split into contiguous index ranges
//! and merged by summation and sorted union, so the outcome does not depend
//! on the number of partitions or threads.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::ff::PrimeModulus;
use crate::heisenberg::{PairPoint, ProjectivePoint};
use crate::hmq::SymmetricParameter;
use crate::small::{det5, kernel5, rref5};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SweepOutcome {
    pub p: u64,
    /// `#{z : det L(z) = 0}`.
    pub xprime: u64,
    /// Points where `rank L(z) <= 3`, sorted.
    pub rank_deficient: Vec<ProjectivePoint>,
    /// Points `(x, z)` of `X~` with `rank [L(z) | M(x)] <= 4`, sorted.
    pub singular: Vec<PairPoint>,
}

#[derive(Default)]
struct Partial {
    xprime: u64,
    rank_deficient: Vec<[u32; 5]>,
    singular: Vec<([u32; 5], [u32; 5])>,
}

impl Partial {
    fn merge(mut self, other: Partial) -> Partial {
        self.xprime += other.xprime;
        self.rank_deficient.extend(other.rank_deficient);
        self.singular.extend(other.singular);
        self
    }
}

/// Number of points of `P^4(F_p)`.
pub fn projective_size(p: u64) -> u64 {
    (0..5).map(|k| p.pow(k)).sum()
}

/// Decodes a global index into the stratified enumeration: first the
/// `p^4` points with `z_0 = 1`, then `p^3` with `z = (0, 1, ...)`, and so on.
fn decode(mut idx: u64, p: u32) -> [u32; 5] {
    let q = p as u64;
    let mut lead = 0;
    loop {
        let size = q.pow(4 - lead as u32);
        if idx < size {
            break;
        }
        idx -= size;
        lead += 1;
    }
    let mut z = [0u32; 5];
    z[lead] = 1;
    for k in (lead + 1..5).rev() {
        z[k] = (idx % q) as u32;
        idx /= q;
    }
    z
}

pub(crate) struct FastMatrices {
    p: u32,
    y: [u32; 5],
}

impl FastMatrices {
    pub(crate) fn new(p: u32, y: &SymmetricParameter) -> Self {
        let pm = PrimeModulus::new(p as u64).expect("prime checked by caller");
        let y = y.reduce(pm).map(|v| v.value() as u32);
        Self { p, y }
    }

    #[inline]
    fn mul(&self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.p as u64) as u32
    }

    /// `L(z)_{ij} = y_{i-j} z_{2j-i}`.
    #[inline]
    pub(crate) fn l(&self, z: &[u32; 5]) -> [[u32; 5]; 5] {
        let mut m = [[0u32; 5]; 5];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = self.mul(self.y[(5 + i - j) % 5], z[(10 + 2 * j - i) % 5]);
            }
        }
        m
    }

    /// `M(x)_{ij} = y_{3(i-j)} x_{3(i+j)}`.
    #[inline]
    pub(crate) fn m(&self, x: &[u32; 5]) -> [[u32; 5]; 5] {
        let mut m = [[0u32; 5]; 5];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = self.mul(self.y[(3 * (5 + i - j)) % 5], x[(3 * (i + j)) % 5]);
            }
        }
        m
    }

    pub(crate) fn is_singular(&self, l: &[[u32; 5]; 5], x: &[u32; 5]) -> bool {
        let m = self.m(x);
        let mut block = [[0u32; 10]; 5];
        for i in 0..5 {
            block[i][..5].copy_from_slice(&l[i]);
            block[i][5..].copy_from_slice(&m[i]);
        }
        rref5(&mut block, self.p).0 <= 4
    }
}

/// Projective points of the span of `basis`, one representative each.
fn projective_span(basis: &[[u32; 5]], p: u32) -> Vec<[u32; 5]> {
    let d = basis.len();
    let mut out = Vec::new();
    for lead in 0..d {
        let free = d - lead - 1;
        let count = (p as u64).pow(free as u32);
        for mut idx in 0..count {
            let mut coeffs = vec![0u32; d];
            coeffs[lead] = 1;
            for c in coeffs.iter_mut().skip(lead + 1).rev() {
                *c = (idx % p as u64) as u32;
                idx /= p as u64;
            }
            let mut v = [0u32; 5];
            for (c, b) in coeffs.iter().zip(basis) {
                for k in 0..5 {
                    v[k] = ((v[k] as u64 + *c as u64 * b[k] as u64) % p as u64) as u32;
                }
            }
            out.push(v);
        }
    }
    out
}

fn sweep_range(fm: &FastMatrices, start: u64, end: u64) -> Partial {
    let p = fm.p;
    let mut acc = Partial::default();
    for idx in start..end {
        let z = decode(idx, p);
        let l = fm.l(&z);
        if det5(&l, p) != 0 {
            continue;
        }
        acc.xprime += 1;
        let kernel = kernel5(&l, p);
        if kernel.len() >= 2 {
            acc.rank_deficient.push(z);
        }
        for x in projective_span(&kernel, p) {
            if fm.is_singular(&l, &x) {
                acc.singular.push((x, z));
            }
        }
    }
    acc
}

/// Runs the pass at the studied parameter over `parts` contiguous ranges.
pub fn sweep(p: PrimeModulus, parts: usize) -> Result<SweepOutcome> {
    sweep_with(p, &SymmetricParameter::STUDIED, parts)
}

pub fn sweep_with(p: PrimeModulus, y: &SymmetricParameter, parts: usize) -> Result<SweepOutcome> {
    let p = PrimeModulus::good(p.get())?.ensure_enumerable()?;
    let q = p.get() as u32;
    let fm = FastMatrices::new(q, y);
    let total = projective_size(p.get());
    let parts = parts.clamp(1, total as usize) as u64;
    let ranges: Vec<(u64, u64)> = (0..parts).map(|k| (total * k / parts, total * (k + 1) / parts)).collect();
    let merged = ranges
        .into_par_iter()
        .map(|(s, e)| sweep_range(&fm, s, e))
        .reduce(Partial::default, Partial::merge);

    let mut rank_deficient: Vec<ProjectivePoint> =
        merged.rank_deficient.into_iter().map(|z| ProjectivePoint::from_raw(p, z).expect("nonzero")).collect();
    rank_deficient.sort();
    let mut singular: Vec<PairPoint> = merged
        .singular
        .into_iter()
        .map(|(x, z)| PairPoint {
            x: ProjectivePoint::from_raw(p, x).expect("kernel vectors are nonzero"),
            z: ProjectivePoint::from_raw(p, z).expect("nonzero"),
        })
        .collect();
    singular.sort();
    singular.dedup();
    Ok(SweepOutcome { p: p.get(), xprime: merged.xprime, rank_deficient, singular })
}

/// Default partition count: a few ranges per worker thread for load balance.
pub fn default_parts() -> usize {
    4 * rayon::current_num_threads().max(1)
}

//! The Heisenberg group `H_5` and a few normalizer elements acting on
//! `P^4(F_p)` and on `P^4 x P^4`.

use std::cmp::Ordering;
use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ff::{primitive_fifth_roots, Fp, PrimeModulus};
use crate::FpMatrix;

/// A point of `P^4(F_p)` whose first nonzero coordinate is 1.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct ProjectivePoint {
    coords: [Fp; 5],
}

impl ProjectivePoint {
    /// Normalizes; `None` for the zero vector.
    pub fn new(coords: [Fp; 5]) -> Option<Self> {
        let lead = coords.iter().find(|c| !c.is_zero())?;
        let inv = lead.inv()?;
        Some(Self { coords: coords.map(|c| c * inv) })
    }

    pub fn from_ints(p: PrimeModulus, v: [i64; 5]) -> Option<Self> {
        Self::new(v.map(|c| p.elem(c)))
    }

    pub(crate) fn from_raw(p: PrimeModulus, v: [u32; 5]) -> Option<Self> {
        Self::new(v.map(|c| Fp::new(c as u64, p)))
    }

    pub fn coords(&self) -> &[Fp; 5] {
        &self.coords
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.coords[0].modulus()
    }

    pub fn values(&self) -> [u64; 5] {
        self.coords.map(Fp::value)
    }

    pub fn zero_count(&self) -> usize {
        self.coords.iter().filter(|c| c.is_zero()).count()
    }

    /// Image under a 5x5 matrix, renormalized.
    pub fn apply(&self, g: &FpMatrix) -> Self {
        let image = g.mul_vec(&self.coords);
        Self::new([image[0], image[1], image[2], image[3], image[4]]).expect("group elements are invertible")
    }
}

impl Ord for ProjectivePoint {
    fn cmp(&self, other: &Self) -> Ordering {
        self.values().cmp(&other.values())
    }
}

impl PartialOrd for ProjectivePoint {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for ProjectivePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(|c| c.signed().to_string()).collect();
        write!(f, "({})", parts.join(":"))
    }
}

impl fmt::Debug for ProjectivePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Serialize for ProjectivePoint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// A point of `P^4(x) x P^4(z)`, both factors normalized.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct PairPoint {
    pub x: ProjectivePoint,
    pub z: ProjectivePoint,
}

impl fmt::Display for PairPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} x {}", self.x, self.z)
    }
}

impl fmt::Debug for PairPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Sigma,
    Tau,
    Iota,
    Mu,
    Delta,
    Composite,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GroupElement {
    pub matrix: FpMatrix,
    pub label: Label,
}

impl GroupElement {
    pub fn compose(&self, other: &GroupElement) -> GroupElement {
        GroupElement { matrix: self.matrix.mul(&other.matrix), label: Label::Composite }
    }

    pub fn pow(&self, n: u32) -> GroupElement {
        let p = self.matrix.get(0, 0).modulus();
        let mut acc = GroupElement { matrix: identity(p), label: Label::Composite };
        for _ in 0..n {
            acc = acc.compose(self);
        }
        acc
    }

    pub fn inverse(&self) -> GroupElement {
        let p = self.matrix.get(0, 0).modulus();
        let aug = self.matrix.hstack(&identity(p));
        let (r, _) = aug.rref();
        let inv = FpMatrix::from_fn(5, 5, |i, j| *r.get(i, j + 5));
        GroupElement { matrix: inv, label: Label::Composite }
    }

    pub fn is_invertible(&self) -> bool {
        self.matrix.rank() == 5
    }

    /// `Some(c)` when the matrix is `c * I`.
    pub fn as_scalar(&self) -> Option<Fp> {
        let c = *self.matrix.get(0, 0);
        let scalar = (0..5).all(|i| (0..5).all(|j| *self.matrix.get(i, j) == if i == j { c } else { c.modulus().zero() }));
        scalar.then_some(c)
    }
}

pub fn identity(p: PrimeModulus) -> FpMatrix {
    FpMatrix::from_fn(5, 5, |i, j| if i == j { p.one() } else { p.zero() })
}

fn permutation(p: PrimeModulus, source: impl Fn(usize) -> usize) -> FpMatrix {
    // (g x)_i = x_{source(i)}
    FpMatrix::from_fn(5, 5, |i, j| if source(i) == j { p.one() } else { p.zero() })
}

/// The choices that realize the group over a given prime: a primitive fifth
/// root `epsilon` (when one exists) and a square root of 5 (when one exists).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Realization {
    #[serde(serialize_with = "ser_modulus")]
    pub p: PrimeModulus,
    #[serde(serialize_with = "ser_opt_fp")]
    pub epsilon: Option<Fp>,
    #[serde(serialize_with = "ser_opt_fp")]
    pub sqrt5: Option<Fp>,
}

fn ser_modulus<S: serde::Serializer>(p: &PrimeModulus, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_u64(p.get())
}

fn ser_opt_fp<S: serde::Serializer>(v: &Option<Fp>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(x) => s.serialize_some(&x.value()),
        None => s.serialize_none(),
    }
}

impl Realization {
    /// Smallest primitive fifth root and smallest nonnegative `sqrt(5)`.
    pub fn new(p: PrimeModulus) -> Result<Self> {
        let eps = primitive_fifth_roots(p)?.into_iter().next();
        Ok(Self { p, epsilon: eps, sqrt5: p.elem(5).sqrt() })
    }

    /// Uses the given primitive fifth root instead of the smallest one.
    pub fn with_epsilon(p: PrimeModulus, eps: Fp) -> Result<Self> {
        let mut r = Self::new(p)?;
        if eps.pow(5) != p.one() || eps == p.one() {
            return Err(Error::NoFifthRoot(p.get()));
        }
        r.epsilon = Some(eps);
        Ok(r)
    }

    pub fn epsilon(&self) -> Result<Fp> {
        self.epsilon.ok_or(Error::NoFifthRoot(self.p.get()))
    }

    pub fn sqrt5(&self) -> Result<Fp> {
        self.sqrt5.ok_or(Error::NoSqrt5(self.p.get()))
    }

    pub fn generator(&self, label: Label) -> Result<GroupElement> {
        let p = self.p;
        let matrix = match label {
            Label::Sigma => permutation(p, |i| (i + 1) % 5),
            Label::Iota => permutation(p, |i| (5 - i) % 5),
            Label::Mu => permutation(p, |i| (2 * i) % 5),
            Label::Tau => {
                let eps = self.epsilon()?;
                FpMatrix::from_fn(5, 5, |i, j| if i == j { eps.pow(i as u64) } else { p.zero() })
            }
            Label::Delta => {
                let eps = self.epsilon()?;
                let scale = self.sqrt5()?.inv().expect("sqrt(5) is nonzero at good primes");
                FpMatrix::from_fn(5, 5, |j, k| eps.pow((j * k % 5) as u64) * scale)
            }
            Label::Composite => {
                return Err(Error::InvalidPolynomial("composite is not a generator".into()));
            }
        };
        Ok(GroupElement { matrix, label })
    }

    /// `<sigma, tau>` when epsilon exists, otherwise `<sigma>`: the part of
    /// `H_5` realized over `F_p`.
    pub fn rational_heisenberg(&self) -> Vec<GroupElement> {
        let mut gens = vec![self.generator(Label::Sigma).expect("sigma always exists")];
        if let Ok(t) = self.generator(Label::Tau) {
            gens.push(t);
        }
        gens
    }

    /// Pair actions `(sigma, sigma)` and `(tau, tau^2)` on `P^4 x P^4`.
    pub fn pair_actions(&self) -> Vec<(GroupElement, GroupElement)> {
        let sigma = self.generator(Label::Sigma).expect("sigma always exists");
        let mut gens = vec![(sigma.clone(), sigma)];
        if let Ok(t) = self.generator(Label::Tau) {
            let t2 = t.compose(&t);
            gens.push((t, t2));
        }
        gens
    }
}

/// Breadth-first closure of `seed` under the moves produced by `step`.
/// Returns the orbit sorted.
pub fn orbit_closure<T, F>(seed: T, step: F) -> Vec<T>
where
    T: Ord + Clone,
    F: Fn(&T) -> Vec<T>,
{
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::new();
    seen.insert(seed.clone());
    queue.push_back(seed);
    while let Some(cur) = queue.pop_front() {
        for next in step(&cur) {
            if seen.insert(next.clone()) {
                queue.push_back(next);
            }
        }
    }
    seen.into_iter().collect()
}

pub fn orbit(seed: ProjectivePoint, generators: &[GroupElement]) -> Vec<ProjectivePoint> {
    orbit_closure(seed, |pt| generators.iter().map(|g| pt.apply(&g.matrix)).collect())
}

pub fn pair_orbit(seed: PairPoint, generators: &[(GroupElement, GroupElement)]) -> Vec<PairPoint> {
    orbit_closure(seed, |pt| {
        generators
            .iter()
            .map(|(gx, gz)| PairPoint { x: pt.x.apply(&gx.matrix), z: pt.z.apply(&gz.matrix) })
            .collect()
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct TwistReport {
    pub p: u64,
    pub epsilon: u64,
    /// Square root of 5 that scales `delta`.
    pub delta_sqrt5: u64,
    /// Square root of 5 placed in the twisted parameter `(0:2:3+s:3+s:2)`.
    pub parameter_sqrt5: u64,
    /// `delta` or `delta^-1`, whichever was checked first and succeeded.
    pub map: String,
    pub source_points: usize,
    pub target_points: usize,
    pub image_on_target: bool,
    pub bijective: bool,
}

/// Checks that `delta` (or its inverse) carries the rational points of
/// `X_{y'}`, `y' = (0:2:3+s:3+s:2)`, bijectively onto those of `X_y`,
/// `y = (2:-1:0:0:-1)`, for one of the two square roots `s` of 5.
pub fn verify_twist_isomorphism(p: PrimeModulus) -> Result<TwistReport> {
    let p = PrimeModulus::good(p.get())?.ensure_enumerable()?;
    let real = Realization::new(p)?;
    let delta = real.generator(Label::Delta)?;
    let delta_inv = delta.inverse();
    let s = real.sqrt5()?;
    let target: BTreeSet<ProjectivePoint> = crate::hmq::enumerate_projective(p)
        .filter(|pt| crate::hmq::quintic_eval(crate::hmq::Variety::X, pt.coords()).is_zero())
        .collect();

    let mut first_failure = None;
    for root in [s, -s] {
        let three = p.elem(3);
        let two = p.elem(2);
        let y_twist = [p.zero(), two, three + root, three + root, two];
        let source: Vec<ProjectivePoint> = crate::hmq::enumerate_projective(p)
            .filter(|pt| crate::hmq::m_matrix(&y_twist, pt.coords()).det().is_zero())
            .collect();
        for (name, g) in [("delta", &delta), ("delta^-1", &delta_inv)] {
            let images: BTreeSet<ProjectivePoint> = source.iter().map(|pt| pt.apply(&g.matrix)).collect();
            let on_target = images.is_subset(&target);
            let report = TwistReport {
                p: p.get(),
                epsilon: real.epsilon()?.value(),
                delta_sqrt5: s.value(),
                parameter_sqrt5: root.value(),
                map: name.to_string(),
                source_points: source.len(),
                target_points: target.len(),
                image_on_target: on_target,
                bijective: on_target && images.len() == source.len() && source.len() == target.len(),
            };
            if report.bijective {
                return Ok(report);
            }
            first_failure.get_or_insert(report);
        }
    }
    Ok(first_failure.expect("at least one candidate was checked"))
}

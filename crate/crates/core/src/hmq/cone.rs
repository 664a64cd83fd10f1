//! Local quadratic analysis at a singular point of `X~`.
//!
//! `X~` is cut out by the five bilinear forms `F = M(x) z`. In affine charts
//! `x = x0 + u`, `z = z0 + v` the expansion is exact at order two:
//! `F(x0 + u, z0 + v) = F(x0, z0) + L(z0) u + M(x0) v + L(v) u`.
//! At a node the Jacobian has rank 4; the combination `λ·F` with `λ` in its
//! left kernel has vanishing linear part, and its quadratic part restricted
//! to the Jacobian kernel is the tangent cone.

use serde::Serialize;

use super::{l_matrix, m_matrix, SymmetricParameter};
use crate::error::{Error, Result};
use crate::ff::Fp;
use crate::heisenberg::PairPoint;
use crate::linalg::Matrix;
use crate::FpMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DiscClass {
    Square,
    Nonsquare,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConeReport {
    pub rank: usize,
    pub disc_class: DiscClass,
    pub chart: (usize, usize),
}

fn last_nonzero(v: &[Fp; 5]) -> usize {
    (0..5).rev().find(|&k| !v[k].is_zero()).expect("projective points are nonzero")
}

pub fn tangent_cone(point: &PairPoint) -> Result<ConeReport> {
    let p = point.x.modulus();
    let y = SymmetricParameter::STUDIED.reduce(p);
    let (x, z) = (point.x.coords(), point.z.coords());
    let degenerate = |detail: String| Error::DegenerateCone { point: point.to_string(), detail };

    let a = last_nonzero(x);
    let b = last_nonzero(z);
    let u_idx: Vec<usize> = (0..5).filter(|&k| k != a).collect();
    let v_idx: Vec<usize> = (0..5).filter(|&m| m != b).collect();

    let l = l_matrix(&y, z);
    let mm = m_matrix(&y, x);
    let jac = l.select_cols(&u_idx).hstack(&mm.select_cols(&v_idx));
    let jrank = jac.rank();
    if jrank != 4 {
        return Err(degenerate(format!("Jacobian rank {jrank}")));
    }
    let lambda = jac.transpose().kernel().pop().expect("rank 4 leaves a one-dimensional left kernel");

    // Polar form of λ·L(v)u, doubled; doubling scales the restricted
    // determinant by 2^4 and leaves its square class alone.
    let mut gram = FpMatrix::from_fn(8, 8, |_, _| p.zero());
    for (ui, &k) in u_idx.iter().enumerate() {
        for (vi, &m) in v_idx.iter().enumerate() {
            let mut e = [p.zero(); 5];
            e[m] = p.one();
            let lm = l_matrix(&y, &e);
            let coeff = (0..5).fold(p.zero(), |acc, i| acc + lambda[i] * *lm.get(i, k));
            gram.set(ui, 4 + vi, coeff);
            gram.set(4 + vi, ui, coeff);
        }
    }

    let basis = jac.kernel();
    let k = Matrix::from_fn(8, basis.len(), |i, j| basis[j][i]);
    let restricted = k.transpose().mul(&gram).mul(&k);
    let rank = restricted.rank();
    if rank < 4 {
        return Err(degenerate(format!("quadratic part has rank {rank}")));
    }
    let disc_class = if restricted.det().legendre() == 1 { DiscClass::Square } else { DiscClass::Nonsquare };
    Ok(ConeReport { rank, disc_class, chart: (a, b) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::PrimeModulus;
    use crate::heisenberg::ProjectivePoint;
    use crate::hmq::node_representatives;

    #[test]
    fn smooth_point_is_rejected() {
        let p = PrimeModulus::new(31).unwrap();
        // on X~ but not singular there
        let pt = PairPoint {
            x: ProjectivePoint::from_ints(p, [2, -1, 0, 0, -1]).unwrap(),
            z: ProjectivePoint::from_ints(p, [0, 1, 0, 0, -1]).unwrap(),
        };
        assert!(matches!(tangent_cone(&pt), Err(Error::DegenerateCone { .. })));
    }

    #[test]
    fn representatives_are_nodes() {
        for prime in [13u64, 29, 31] {
            let p = PrimeModulus::new(prime).unwrap();
            for (class, rep) in node_representatives(p) {
                let cone = tangent_cone(&rep).unwrap();
                assert_eq!(cone.rank, 4, "{class:?} at {prime}");
            }
        }
    }
}

//! The elliptic curve `E_2` in two models: a short Weierstrass equation and
//! the genus-one normal quintic cut out by 4x4 Pfaffians.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ff::{Fp, PrimeModulus};
use crate::hmq::enumerate_projective;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct EllipticCurveModel {
    pub a: i128,
    pub b: i128,
}

/// `y^2 = x^3 - 27 c4 x - 54 c6` with `c4 = -5909375`, `c6 = -8087890625`.
pub const E2: EllipticCurveModel = EllipticCurveModel { a: -27 * -5_909_375, b: -54 * -8_087_890_625 };

impl EllipticCurveModel {
    /// `-16 (4 A^3 + 27 B^2)`.
    pub fn discriminant(&self) -> i128 {
        -16 * (4 * self.a * self.a * self.a + 27 * self.b * self.b)
    }

    pub fn has_good_model_at(&self, p: PrimeModulus) -> bool {
        p.get() > 3 && self.discriminant() % p.get() as i128 != 0
    }

    /// `#E(F_p)` including the point at infinity.
    pub fn point_count(&self, p: PrimeModulus) -> Result<u64> {
        if !self.has_good_model_at(p) {
            return Err(Error::BadPrime(p.get()));
        }
        let (a, b) = (Fp::from_i128(self.a, p), Fp::from_i128(self.b, p));
        let affine: i64 = p.elements().map(|x| 1 + (x * x * x + a * x + b).legendre() as i64).sum();
        Ok(1 + affine as u64)
    }

    pub fn trace(&self, p: PrimeModulus) -> Result<i64> {
        Ok(p.get() as i64 + 1 - self.point_count(p)? as i64)
    }
}

/// `a_p(E_2)`. The Weierstrass model degenerates at 3 (its coefficients are
/// divisible by 27); there the Pfaffian model, smooth away from 2, 5 and 11,
/// supplies the count instead.
pub fn e2_trace(p: PrimeModulus) -> Result<i64> {
    let p = PrimeModulus::good(p.get())?;
    if E2.has_good_model_at(p) {
        E2.trace(p)
    } else {
        let n = pfaffian_zero_count(2, -1, p.ensure_enumerable()?);
        Ok(p.get() as i64 + 1 - n as i64)
    }
}

/// `a1 a2 (a1^10 - 11 a1^5 a2^5 - a2^10)`; nonzero exactly for smooth fibres.
pub fn smoothness_invariant(a1: i64, a2: i64) -> i128 {
    let (a1, a2) = (a1 as i128, a2 as i128);
    a1 * a2 * (a1.pow(10) - 11 * a1.pow(5) * a2.pow(5) - a2.pow(10))
}

/// An entry `coeff * x_var` of the linear antisymmetric matrix.
pub type LinearEntry = Option<(i64, usize)>;

/// The antisymmetric 5x5 matrix of linear forms attached to
/// `a = (0 : a1 : a2 : -a2 : -a1)`, entry by entry.
pub fn pfaffian_matrix(a1: i64, a2: i64) -> [[LinearEntry; 5]; 5] {
    let e = |c: i64, v: usize| Some((c, v));
    [
        [None, e(-a1, 1), e(-a2, 2), e(a2, 3), e(a1, 4)],
        [e(a1, 1), None, e(-a1, 3), e(-a2, 4), e(a2, 0)],
        [e(a2, 2), e(a1, 3), None, e(-a1, 0), e(-a2, 1)],
        [e(-a2, 3), e(a2, 4), e(a1, 0), None, e(-a1, 2)],
        [e(-a1, 4), e(-a2, 0), e(a2, 1), e(a1, 2), None],
    ]
}

/// Integer quadratic form `Σ_{i<=j} c_ij x_i x_j`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QuadraticForm {
    pub coefficients: [[i64; 5]; 5],
}

impl QuadraticForm {
    fn zero() -> Self {
        Self { coefficients: [[0; 5]; 5] }
    }

    fn add_product(&mut self, sign: i64, f: LinearEntry, g: LinearEntry) {
        if let (Some((c, i)), Some((d, j))) = (f, g) {
            let (lo, hi) = (i.min(j), i.max(j));
            self.coefficients[lo][hi] += sign * c * d;
        }
    }

    pub fn eval(&self, x: &[Fp; 5]) -> Fp {
        let p = x[0].modulus();
        let mut acc = p.zero();
        for i in 0..5 {
            for j in i..5 {
                let c = self.coefficients[i][j];
                if c != 0 {
                    acc += p.elem(c) * x[i] * x[j];
                }
            }
        }
        acc
    }
}

/// Pfaffians of the five principal 4x4 submatrices; the `k`-th omits row and
/// column `k`. For indices `a < b < c < d`:
/// `Pf = m_ab m_cd - m_ac m_bd + m_ad m_bc`.
pub fn pfaffian_quadrics(a1: i64, a2: i64) -> [QuadraticForm; 5] {
    let m = pfaffian_matrix(a1, a2);
    std::array::from_fn(|k| {
        let idx: Vec<usize> = (0..5).filter(|&i| i != k).collect();
        let (a, b, c, d) = (idx[0], idx[1], idx[2], idx[3]);
        let mut q = QuadraticForm::zero();
        q.add_product(1, m[a][b], m[c][d]);
        q.add_product(-1, m[a][c], m[b][d]);
        q.add_product(1, m[a][d], m[b][c]);
        q
    })
}

/// Number of points of `P^4(F_p)` where all five Pfaffians vanish.
pub fn pfaffian_zero_count(a1: i64, a2: i64, p: PrimeModulus) -> usize {
    let forms = pfaffian_quadrics(a1, a2);
    enumerate_projective(p).filter(|pt| forms.iter().all(|q| q.eval(pt.coords()).is_zero())).count()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(p: u64) -> PrimeModulus {
        PrimeModulus::new(p).unwrap()
    }

    #[test]
    fn model_constants() {
        assert_eq!(E2.a, 159_553_125);
        assert_eq!(E2.b, 436_746_093_750);
        assert!(E2.discriminant() != 0);
    }

    #[test]
    fn traces_from_table_differences() {
        // (count shift, trace gap) pairs give p * a_p: 134 + 83 = 217 = 31 * 7,
        // and -20 + 165 = 145 = 29 * 5
        assert_eq!(e2_trace(m(31)).unwrap(), 7);
        assert_eq!(e2_trace(m(29)).unwrap(), 5);
    }

    #[test]
    fn hasse_bound() {
        for p in [3u64, 7, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 97] {
            let a = e2_trace(m(p)).unwrap();
            assert!(a * a <= 4 * p as i64, "p = {p}, a = {a}");
        }
    }

    #[test]
    fn weierstrass_matches_pfaffian_model() {
        for p in [7u64, 13, 29, 31] {
            let n = pfaffian_zero_count(2, -1, m(p)) as i64;
            assert_eq!(n, p as i64 + 1 - E2.trace(m(p)).unwrap(), "p = {p}");
        }
    }

    #[test]
    fn bad_primes() {
        for p in [5, 11] {
            assert!(matches!(e2_trace(m(p)), Err(Error::BadPrime(_))));
        }
    }

    #[test]
    fn smoothness_values() {
        assert_eq!(smoothness_invariant(2, -1), -2750);
        assert_eq!(smoothness_invariant(1, 0), 0);
    }

    #[test]
    fn matrix_is_antisymmetric() {
        let mat = pfaffian_matrix(2, -1);
        for i in 0..5 {
            for j in 0..5 {
                match (mat[i][j], mat[j][i]) {
                    (None, None) => assert_eq!(i, j),
                    (Some((c, v)), Some((d, w))) => {
                        assert_eq!(c, -d);
                        assert_eq!(v, w);
                        assert_eq!(v, (i + j) % 5);
                    }
                    _ => panic!("asymmetric support at ({i}, {j})"),
                }
            }
        }
    }
}

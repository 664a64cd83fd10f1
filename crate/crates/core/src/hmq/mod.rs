//! Determinantal geometry of the symmetric Horrocks-Mumford quintic at
//! `y = (2:-1:0:0:-1)`.
//!
//! `X = {det M_y(x) = 0}` and `X' = {det L_y(z) = 0}` are linked through the
//! bilinear identity `M_y(x) z = L_y(z) x`; `X~ ⊂ P^4 x P^4` is cut out by it.

pub mod census;
mod cone;
mod elliptic;

pub use census::{classify, node_representatives, singular_census, NodeClass, NodeRecord};
pub use cone::{tangent_cone, ConeReport, DiscClass};
pub use elliptic::{
    e2_trace, pfaffian_matrix, pfaffian_quadrics, pfaffian_zero_count, smoothness_invariant,
    EllipticCurveModel, QuadraticForm, E2,
};

use serde::{Deserialize, Serialize};

use crate::ff::{Fp, PrimeModulus};
use crate::heisenberg::ProjectivePoint;
use crate::linalg::{Field, Matrix};
use crate::FpMatrix;

/// `y = (a, b, c, c, b)`, a point of the positive eigenspace of `iota`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymmetricParameter {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl SymmetricParameter {
    /// The parameter the pipeline is built around.
    pub const STUDIED: Self = Self { a: 2, b: -1, c: 0 };

    pub fn coords(&self) -> [i64; 5] {
        [self.a, self.b, self.c, self.c, self.b]
    }

    pub fn reduce(&self, p: PrimeModulus) -> [Fp; 5] {
        self.coords().map(|v| p.elem(v))
    }

    pub fn has_zero_coordinate(&self) -> bool {
        self.coords().contains(&0)
    }
}

impl Default for SymmetricParameter {
    fn default() -> Self {
        Self::STUDIED
    }
}

#[inline]
fn m5(i: i64) -> usize {
    i.rem_euclid(5) as usize
}

/// `M_y(x)_{ij} = y_{3(i-j)} x_{3(i+j)}`.
pub fn m_matrix<F: Field>(y: &[F], x: &[F]) -> Matrix<F> {
    Matrix::from_fn(5, 5, |i, j| {
        let (i, j) = (i as i64, j as i64);
        y[m5(3 * (i - j))].clone() * x[m5(3 * (i + j))].clone()
    })
}

/// `L_y(z)_{ij} = y_{i-j} z_{2j-i}`, the partner of `M_y` under
/// `M_y(x) z = L_y(z) x`.
pub fn l_matrix<F: Field>(y: &[F], z: &[F]) -> Matrix<F> {
    Matrix::from_fn(5, 5, |i, j| {
        let (i, j) = (i as i64, j as i64);
        y[m5(i - j)].clone() * z[m5(2 * j - i)].clone()
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MatrixKind {
    M,
    L,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DetMatrix {
    pub kind: MatrixKind,
    pub entries: FpMatrix,
}

pub fn matrix_at(kind: MatrixKind, y: &SymmetricParameter, point: &ProjectivePoint) -> DetMatrix {
    let yv = y.reduce(point.modulus());
    let entries = match kind {
        MatrixKind::M => m_matrix(&yv, point.coords()),
        MatrixKind::L => l_matrix(&yv, point.coords()),
    };
    DetMatrix { kind, entries }
}

pub fn rank(matrix: &DetMatrix) -> usize {
    matrix.entries.rank()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variety {
    X,
    Xprime,
}

fn cyclic_sum<F: Field>(v: &[F], term: impl Fn(&dyn Fn(usize) -> F) -> F) -> F {
    let mut acc = v[0].zero_like();
    for i in 0..5 {
        let at = |k: usize| v[(i + k) % 5].clone();
        acc = acc + term(&at);
    }
    acc
}

fn pow<F: Field>(a: F, e: u32) -> F {
    let mut acc = a.one_like();
    for _ in 0..e {
        acc = acc * a.clone();
    }
    acc
}

/// The six Heisenberg-invariant quintics, in the order
/// `Σx^5, Σx_i^3 x_{i+1} x_{i+4}, Σx_i x_{i+1}^2 x_{i+4}^2,
///  Σx_i^3 x_{i+2} x_{i+3}, Σx_i x_{i+2}^2 x_{i+3}^2, Πx_i`.
pub fn invariant_basis_eval<F: Field>(v: &[F]) -> [F; 6] {
    let product = v.iter().skip(1).fold(v[0].clone(), |acc, c| acc * c.clone());
    [
        cyclic_sum(v, |x| pow(x(0), 5)),
        cyclic_sum(v, |x| pow(x(0), 3) * x(1) * x(4)),
        cyclic_sum(v, |x| x(0) * pow(x(1), 2) * pow(x(4), 2)),
        cyclic_sum(v, |x| pow(x(0), 3) * x(2) * x(3)),
        cyclic_sum(v, |x| x(0) * pow(x(2), 2) * pow(x(3), 2)),
        product,
    ]
}

/// Coefficients of the two quintics in the invariant basis.
pub fn basis_coefficients(variety: Variety) -> [i64; 6] {
    match variety {
        Variety::X => [0, 0, 0, -4, 1, 15],
        Variety::Xprime => [0, 0, -4, 1, 0, 15],
    }
}

/// Evaluates the defining quintic of `X` or `X'` written out monomial by
/// monomial. Both equal `det / 2` of the corresponding matrix at the
/// studied parameter.
pub fn quintic_eval<F: Field>(variety: Variety, v: &[F]) -> F {
    let c = |k: i64| v[0].from_i64_like(k);
    let product = v.iter().skip(1).fold(v[0].clone(), |acc, x| acc * x.clone());
    let sum = match variety {
        Variety::X => cyclic_sum(v, |x| x(0) * pow(x(2), 2) * pow(x(3), 2) - c(4) * pow(x(0), 3) * x(2) * x(3)),
        Variety::Xprime => cyclic_sum(v, |x| pow(x(0), 3) * x(2) * x(3) - c(4) * x(0) * pow(x(1), 2) * pow(x(4), 2)),
    };
    sum + c(15) * product
}

/// Gradient of `det M_y(x)` through the adjugate:
/// `d det / d x_k = Σ_ij C_ij dM_ij/dx_k`.
pub fn det_m_gradient<F: Field>(y: &[F], x: &[F]) -> Vec<F> {
    let cof = m_matrix(y, x).cofactors();
    let mut grad = vec![x[0].zero_like(); 5];
    for i in 0..5i64 {
        for j in 0..5i64 {
            let k = m5(3 * (i + j));
            let term = cof.get(i as usize, j as usize).clone() * y[m5(3 * (i - j))].clone();
            grad[k] = grad[k].clone() + term;
        }
    }
    grad
}

/// True iff `x` is a singular point of `{det M_y = 0}`.
pub fn special_param_check(y: &SymmetricParameter, x: &ProjectivePoint) -> bool {
    let yv = y.reduce(x.modulus());
    m_matrix(&yv, x.coords()).det().is_zero() && det_m_gradient(&yv, x.coords()).iter().all(|g| g.is_zero())
}

/// All points of `P^4(F_p)` in lexicographic order of normalized coordinates,
/// stratified by the position of the leading 1.
pub fn enumerate_projective(p: PrimeModulus) -> impl Iterator<Item = ProjectivePoint> {
    let q = p.get() as u32;
    (0..5usize).flat_map(move |lead| {
        let free = 4 - lead;
        let total = (q as u64).pow(free as u32);
        (0..total).map(move |mut idx| {
            let mut raw = [0u32; 5];
            raw[lead] = 1;
            for k in (lead + 1..5).rev() {
                raw[k] = (idx % q as u64) as u32;
                idx /= q as u64;
            }
            ProjectivePoint::from_raw(p, raw).expect("leading coordinate is 1")
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{QMatrix, Rational};
    use proptest::prelude::*;

    fn m(p: u64) -> PrimeModulus {
        PrimeModulus::new(p).unwrap()
    }

    fn pt(p: u64, v: [i64; 5]) -> ProjectivePoint {
        ProjectivePoint::from_ints(m(p), v).unwrap()
    }

    fn y31() -> [Fp; 5] {
        SymmetricParameter::STUDIED.reduce(m(31))
    }

    #[test]
    fn m_at_basis_vector() {
        let mat = matrix_at(MatrixKind::M, &SymmetricParameter::STUDIED, &pt(31, [1, 0, 0, 0, 0]));
        let y = y31();
        for i in 0..5i64 {
            for j in 0..5i64 {
                let expected = if m5(3 * (i + j)) == 0 { y[m5(3 * (i - j))] } else { m(31).zero() };
                assert_eq!(*mat.entries.get(i as usize, j as usize), expected);
            }
        }
    }

    #[test]
    fn det_l_vanishes_at_all_ones() {
        let mat = matrix_at(MatrixKind::L, &SymmetricParameter::STUDIED, &pt(31, [1, 1, 1, 1, 1]));
        assert!(mat.entries.det().is_zero());
    }

    #[test]
    fn quintic_examples() {
        assert!(quintic_eval(Variety::X, pt(31, [1, 0, 0, 0, 0]).coords()).is_zero());
        assert!(quintic_eval(Variety::Xprime, pt(31, [1, 1, 1, 1, 1]).coords()).is_zero());
        assert!(quintic_eval(Variety::X, pt(31, [1, 1, 1, 1, 1]).coords()).is_zero());
        for p in [13, 31, 41] {
            assert_eq!(quintic_eval(Variety::X, pt(p, [1, 1, 1, 1, 0]).coords()), m(p).elem(-6));
        }
    }

    #[test]
    fn rank_examples() {
        let y = SymmetricParameter::STUDIED;
        assert_eq!(rank(&matrix_at(MatrixKind::L, &y, &pt(31, [0, 0, 1, 0, 0]))), 3);
        let zero = DetMatrix { kind: MatrixKind::L, entries: FpMatrix::from_fn(5, 5, |_, _| m(31).zero()) };
        assert_eq!(rank(&zero), 0);
        let generic = matrix_at(MatrixKind::L, &y, &pt(31, [1, 2, 3, 4, 5]));
        if !generic.entries.det().is_zero() {
            assert_eq!(rank(&generic), 5);
        }
    }

    #[test]
    fn base_locus_line() {
        // L_00 = {x0 = x1 + x4 = x2 + x3 = 0}
        for s in 0..31 {
            for t in 0..31 {
                if s == 0 && t == 0 {
                    continue;
                }
                let v = pt(31, [0, s, t, -t, -s]);
                assert!(invariant_basis_eval(v.coords()).iter().all(|c| c.is_zero()));
            }
        }
        let ones = invariant_basis_eval(pt(31, [1, 1, 1, 1, 1]).coords());
        assert_eq!(ones[5].value(), 1);
    }

    #[test]
    fn special_parameter_examples() {
        let y = SymmetricParameter::STUDIED;
        for p in [13, 29, 31] {
            assert!(special_param_check(&y, &pt(p, [1, 0, 0, 0, 0])));
            assert!(special_param_check(&y, &pt(p, [1, 1, 1, 1, 1])));
        }
        let generic = SymmetricParameter { a: 1, b: 1, c: 1 };
        for p in [13, 29, 31, 37] {
            assert!(!special_param_check(&generic, &pt(p, [1, 0, 0, 0, 0])));
        }
    }

    #[test]
    fn gradient_matches_finite_difference_over_rationals() {
        // det is a quintic, so the exact derivative equals a symmetric
        // difference quotient evaluated on the polynomial restricted to a line
        let y: Vec<Rational> = [2, -1, 0, 0, -1].iter().map(|&v| Rational::from_integer(v)).collect();
        let x: Vec<Rational> = [3, -1, 4, 1, -5].iter().map(|&v| Rational::from_integer(v)).collect();
        let grad = det_m_gradient(&y, &x);
        for k in 0..5 {
            // f(t) = det M(x + t e_k) is a degree-5 polynomial in t; recover f'(0)
            // from six samples by Lagrange differentiation at 0
            let ts: Vec<i128> = (-3..=3).filter(|&t| t != 0).chain([0]).collect();
            let f = |t: i128| {
                let mut xt = x.clone();
                xt[k] += Rational::from_integer(t);
                m_matrix(&y, &xt).det()
            };
            let mut deriv = Rational::from_integer(0);
            for (a, &ta) in ts.iter().enumerate() {
                // d/dt of the Lagrange basis polynomial l_a at t = 0
                let denom = ts.iter().enumerate().filter(|&(b, _)| b != a).fold(Rational::from_integer(1), |acc, (_, &tb)| {
                    acc * Rational::from_integer(ta - tb)
                });
                let mut num = Rational::from_integer(0);
                for (b, _) in ts.iter().enumerate().filter(|&(b, _)| b != a) {
                    num += ts
                        .iter()
                        .enumerate()
                        .filter(|&(c, _)| c != a && c != b)
                        .fold(Rational::from_integer(1), |acc, (_, &tc)| acc * Rational::from_integer(-tc));
                }
                deriv += f(ta) * num / denom;
            }
            assert_eq!(grad[k], deriv, "k = {k}");
        }
    }

    #[test]
    fn determinants_are_twice_the_quintics_over_rationals() {
        let y: Vec<Rational> = [2, -1, 0, 0, -1].iter().map(|&v| Rational::from_integer(v)).collect();
        let two = Rational::from_integer(2);
        for seed in 0..40i128 {
            let v: Vec<Rational> = (0..5).map(|k| Rational::from_integer((seed * 7 + k * k * 3 + k) % 11 - 5)).collect();
            assert_eq!(m_matrix(&y, &v).det(), two * quintic_eval(Variety::X, &v));
            assert_eq!(l_matrix(&y, &v).det(), two * quintic_eval(Variety::Xprime, &v));
        }
        let _: QMatrix = m_matrix(&y, &y);
    }

    #[test]
    fn enumeration_covers_projective_space_once() {
        let pts: Vec<_> = enumerate_projective(m(3)).collect();
        assert_eq!(pts.len(), 121);
        let set: std::collections::BTreeSet<_> = pts.iter().copied().collect();
        assert_eq!(set.len(), 121);
    }

    fn arb_vec(p: u64) -> impl Strategy<Value = [i64; 5]> {
        proptest::array::uniform5(0..p as i64)
    }

    proptest! {
        #[test]
        fn bilinear_identity(x in arb_vec(31), z in arb_vec(31)) {
            let p = m(31);
            let (x, z) = (x.map(|v| p.elem(v)), z.map(|v| p.elem(v)));
            let y = y31();
            prop_assert_eq!(m_matrix(&y, &x).mul_vec(&z), l_matrix(&y, &z).mul_vec(&x));
        }

        #[test]
        fn basis_combination_is_x(v in arb_vec(41)) {
            let p = m(41);
            let v = v.map(|c| p.elem(c));
            for variety in [Variety::X, Variety::Xprime] {
                let basis = invariant_basis_eval(&v);
                let combo = basis.iter().zip(basis_coefficients(variety)).fold(p.zero(), |acc, (b, c)| acc + *b * p.elem(c));
                prop_assert_eq!(combo, quintic_eval(variety, &v));
            }
        }
    }
}

//! Dense linear algebra over an arbitrary exact field.
//!
//! The scalar type is generic so the same elimination code runs over `F_p`
//! and over the rationals; the rational instance serves as a characteristic-0
//! cross-check of identities that are otherwise verified prime by prime.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_rational::Ratio;
use num_traits::{FromPrimitive, One, Signed, Zero};

use crate::ff::Fp;

/// An exact field whose identities can be produced from any element.
///
/// `F_p` elements carry a runtime modulus, so `zero`/`one` are taken relative
/// to an existing element instead of from `num_traits::Zero`.
pub trait Field:
    Clone + PartialEq + Debug + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn is_zero_elem(&self) -> bool;
    /// Image of an integer in the same field as `self`.
    fn from_i64_like(&self, v: i64) -> Self;
    /// Inverse of a nonzero element.
    fn invert(&self) -> Self;
}

impl Field for Fp {
    fn zero_like(&self) -> Self {
        self.modulus().zero()
    }
    fn one_like(&self) -> Self {
        self.modulus().one()
    }
    fn is_zero_elem(&self) -> bool {
        self.is_zero()
    }
    fn from_i64_like(&self, v: i64) -> Self {
        self.modulus().elem(v)
    }
    fn invert(&self) -> Self {
        self.inv().expect("inverse of zero")
    }
}

impl<T> Field for Ratio<T>
where
    T: Clone + num_integer::Integer + Signed + FromPrimitive + Debug,
    Ratio<T>: Div<Output = Ratio<T>>,
{
    fn zero_like(&self) -> Self {
        Ratio::zero()
    }
    fn one_like(&self) -> Self {
        Ratio::one()
    }
    fn is_zero_elem(&self) -> bool {
        Zero::is_zero(self)
    }
    fn from_i64_like(&self, v: i64) -> Self {
        Ratio::from_integer(T::from_i64(v).expect("integer fits the rational base type"))
    }
    fn invert(&self) -> Self {
        Ratio::one() / self.clone()
    }
}

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<F> {
    rows: usize,
    cols: usize,
    data: Vec<F>,
}

impl<F: Field> Matrix<F> {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> F) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<F>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &F {
        &self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: F) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[F] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn mul_vec(&self, v: &[F]) -> Vec<F> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                let mut acc = v[0].zero_like();
                for (a, b) in self.row(i).iter().zip(v) {
                    acc = acc + a.clone() * b.clone();
                }
                acc
            })
            .collect()
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows);
        Self::from_fn(self.rows, other.cols, |i, j| {
            let mut acc = self.get(i, 0).zero_like();
            for k in 0..self.cols {
                acc = acc + self.get(i, k).clone() * other.get(k, j).clone();
            }
            acc
        })
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hstack(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows);
        Self::from_fn(self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self.get(i, j).clone()
            } else {
                other.get(i, j - self.cols).clone()
            }
        })
    }

    /// Keeps the listed columns, in order.
    pub fn select_cols(&self, cols: &[usize]) -> Self {
        Self::from_fn(self.rows, cols.len(), |i, j| self.get(i, cols[j]).clone())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Field::is_zero_elem)
    }

    /// Reduced row echelon form and the pivot columns.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(pr) = (r..m.rows).find(|&i| !m.get(i, c).is_zero_elem()) else {
                continue;
            };
            m.swap_rows(r, pr);
            let inv = m.get(r, c).invert();
            for j in 0..m.cols {
                let v = m.get(r, j).clone() * inv.clone();
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r || m.get(i, c).is_zero_elem() {
                    continue;
                }
                let factor = m.get(i, c).clone();
                for j in 0..m.cols {
                    let v = m.get(i, j).clone() - factor.clone() * m.get(r, j).clone();
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right kernel `{v : self * v = 0}`.
    pub fn kernel(&self) -> Vec<Vec<F>> {
        let Some(sample) = self.data.first() else {
            return Vec::new();
        };
        let zero = sample.zero_like();
        let one = sample.one_like();
        let (r, pivots) = self.rref();
        (0..self.cols)
            .filter(|c| !pivots.contains(c))
            .map(|free| {
                let mut v = vec![zero.clone(); self.cols];
                v[free] = one.clone();
                for (i, &pc) in pivots.iter().enumerate() {
                    v[pc] = -r.get(i, free).clone();
                }
                v
            })
            .collect()
    }

    /// Determinant by elimination; square matrices only.
    pub fn det(&self) -> F {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let mut m = self.clone();
        let mut acc = self.data[0].one_like();
        for c in 0..m.cols {
            let Some(pr) = (c..m.rows).find(|&i| !m.get(i, c).is_zero_elem()) else {
                return acc.zero_like();
            };
            if pr != c {
                m.swap_rows(c, pr);
                acc = -acc;
            }
            let pivot = m.get(c, c).clone();
            acc = acc * pivot.clone();
            let inv = pivot.invert();
            for i in c + 1..m.rows {
                if m.get(i, c).is_zero_elem() {
                    continue;
                }
                let factor = m.get(i, c).clone() * inv.clone();
                for j in c..m.cols {
                    let v = m.get(i, j).clone() - factor.clone() * m.get(c, j).clone();
                    m.set(i, j, v);
                }
            }
        }
        acc
    }

    /// Matrix with row `i` and column `j` removed.
    pub fn minor(&self, i: usize, j: usize) -> Self {
        let rows: Vec<usize> = (0..self.rows).filter(|&r| r != i).collect();
        let cols: Vec<usize> = (0..self.cols).filter(|&c| c != j).collect();
        Self::from_fn(rows.len(), cols.len(), |a, b| self.get(rows[a], cols[b]).clone())
    }

    /// Cofactor matrix, `C_ij = (-1)^(i+j) det(minor(i, j))`.
    pub fn cofactors(&self) -> Self {
        assert_eq!(self.rows, self.cols);
        Self::from_fn(self.rows, self.cols, |i, j| {
            let d = self.minor(i, j).det();
            if (i + j) % 2 == 0 {
                d
            } else {
                -d
            }
        })
    }
}

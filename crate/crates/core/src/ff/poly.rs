use std::fmt;

use serde::{Deserialize, Serialize};

use super::{mul_mod, pow_mod, PrimeModulus};
use crate::error::{Error, Result};

/// Integer polynomial, constant term first, with nonzero leading coefficient.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<i64>", into = "Vec<i64>")]
pub struct IntPolynomial {
    coefficients: Vec<i64>,
}

impl IntPolynomial {
    pub fn new(mut coefficients: Vec<i64>) -> Result<Self> {
        while coefficients.last() == Some(&0) {
            coefficients.pop();
        }
        if coefficients.is_empty() {
            return Err(Error::InvalidPolynomial("zero polynomial".into()));
        }
        Ok(Self { coefficients })
    }

    pub fn coefficients(&self) -> &[i64] {
        &self.coefficients
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn eval(&self, x: i128) -> i128 {
        self.coefficients.iter().rev().fold(0i128, |acc, &c| acc * x + c as i128)
    }

    /// Discriminant of a monic cubic `x^3 + a x + b` or general cubic via the
    /// standard formula; `None` for other degrees.
    pub fn cubic_discriminant(&self) -> Option<i128> {
        if self.degree() != 3 {
            return None;
        }
        let c = |i: usize| self.coefficients[i] as i128;
        let (d, cc, b, a) = (c(0), c(1), c(2), c(3));
        Some(b * b * cc * cc - 4 * a * cc * cc * cc - 4 * b * b * b * d - 27 * a * a * d * d + 18 * a * b * cc * d)
    }

    fn reduce(&self, p: PrimeModulus) -> Result<Vec<u64>> {
        let f: Vec<u64> = self
            .coefficients
            .iter()
            .map(|&c| (c as i128).rem_euclid(p.get() as i128) as u64)
            .collect();
        if *f.last().unwrap() == 0 {
            return Err(Error::DegreeDrop { poly: self.to_string(), p: p.get() });
        }
        Ok(f)
    }
}

impl TryFrom<Vec<i64>> for IntPolynomial {
    type Error = Error;
    fn try_from(v: Vec<i64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<IntPolynomial> for Vec<i64> {
    fn from(f: IntPolynomial) -> Vec<i64> {
        f.coefficients
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, &c) in self.coefficients.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let sign = if c < 0 { "-" } else { "+" };
            if first {
                if c < 0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            let a = c.unsigned_abs();
            match (k, a) {
                (0, _) => write!(f, "{a}")?,
                (1, 1) => write!(f, "x")?,
                (1, _) => write!(f, "{a}x")?,
                (_, 1) => write!(f, "x^{k}")?,
                _ => write!(f, "{a}x^{k}")?,
            }
            first = false;
        }
        Ok(())
    }
}

// Dense polynomials over F_p, constant term first, no trailing zeros.
type Poly = Vec<u64>;

fn trim(f: &mut Poly) {
    while f.last() == Some(&0) {
        f.pop();
    }
}

fn deg(f: &Poly) -> Option<usize> {
    f.len().checked_sub(1)
}

fn monic(f: &Poly, p: u64) -> Poly {
    let lead = *f.last().unwrap();
    let inv = pow_mod(lead, p - 2, p);
    f.iter().map(|&c| mul_mod(c, inv, p)).collect()
}

fn rem(a: &Poly, b: &Poly, p: u64) -> Poly {
    let mut r = a.clone();
    trim(&mut r);
    let db = deg(b).expect("division by zero polynomial");
    let inv = pow_mod(*b.last().unwrap(), p - 2, p);
    while let Some(dr) = deg(&r) {
        if dr < db {
            break;
        }
        let q = mul_mod(r[dr], inv, p);
        let shift = dr - db;
        for (i, &bc) in b.iter().enumerate() {
            r[shift + i] = (r[shift + i] + p - mul_mod(q, bc, p)) % p;
        }
        trim(&mut r);
    }
    r
}

fn gcd(a: &Poly, b: &Poly, p: u64) -> Poly {
    let (mut a, mut b) = (a.clone(), b.clone());
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        let r = rem(&a, &b, p);
        a = b;
        b = r;
    }
    if a.is_empty() {
        a
    } else {
        monic(&a, p)
    }
}

fn mul_rem(a: &Poly, b: &Poly, m: &Poly, p: u64) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + mul_mod(x, y, p)) % p;
        }
    }
    rem(&out, m, p)
}

fn pow_rem(base: &Poly, mut e: u64, m: &Poly, p: u64) -> Poly {
    let mut acc = rem(&vec![1], m, p);
    let mut b = rem(base, m, p);
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_rem(&acc, &b, m, p);
        }
        b = mul_rem(&b, &b, m, p);
        e >>= 1;
    }
    acc
}

fn sub(a: &Poly, b: &Poly, p: u64) -> Poly {
    let n = a.len().max(b.len());
    let mut out: Poly = (0..n)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            (x + p - y) % p
        })
        .collect();
    trim(&mut out);
    out
}

fn derivative(f: &Poly, p: u64) -> Poly {
    let mut d: Poly = f.iter().enumerate().skip(1).map(|(k, &c)| mul_mod(c, k as u64 % p, p)).collect();
    trim(&mut d);
    d
}

fn eval(f: &Poly, x: u64, p: u64) -> u64 {
    f.iter().rev().fold(0, |acc, &c| (mul_mod(acc, x, p) + c) % p)
}

fn div_linear(f: &Poly, root: u64, p: u64) -> Poly {
    // Synthetic division by (x - root).
    let n = f.len();
    let mut q = vec![0u64; n - 1];
    let mut carry = 0u64;
    for k in (1..n).rev() {
        carry = (f[k] + mul_mod(carry, root, p)) % p;
        q[k - 1] = carry;
    }
    q
}

fn prepare(f: &IntPolynomial, p: PrimeModulus) -> Result<Poly> {
    if f.degree() > 4 {
        return Err(Error::InvalidPolynomial(format!("{f} has degree above 4")));
    }
    let g = f.reduce(p)?;
    if g.len() > 1 {
        let d = derivative(&g, p.get());
        if deg(&gcd(&g, &d, p.get())) != Some(0) {
            return Err(Error::Ramified { poly: f.to_string(), p: p.get() });
        }
    }
    Ok(g)
}

/// Factor degrees of a squarefree polynomial of degree at most 4 mod `p`,
/// sorted ascending.
pub fn factor_degrees(f: &IntPolynomial, p: PrimeModulus) -> Result<Vec<usize>> {
    factor_degrees_by_ddf(f, p)
}

/// Distinct-degree factorization: the degree-`k` part is
/// `gcd(f, x^(p^k) - x)` after removing lower-degree parts.
pub fn factor_degrees_by_ddf(f: &IntPolynomial, p: PrimeModulus) -> Result<Vec<usize>> {
    let q = p.get();
    let mut rest = monic(&prepare(f, p)?, q);
    let mut out = Vec::new();
    let x: Poly = vec![0, 1];
    let mut frob = x.clone();
    let mut k = 1;
    while deg(&rest).unwrap_or(0) >= 2 * k {
        frob = pow_rem(&frob, q, &rest, q);
        let g = gcd(&rest, &sub(&frob, &x, q), q);
        let dg = deg(&g).unwrap_or(0);
        if dg > 0 {
            out.extend(std::iter::repeat_n(k, dg / k));
            rest = divide_exact(&rest, &g, q);
            frob = rem(&frob, &rest, q);
        }
        k += 1;
    }
    if let Some(d) = deg(&rest) {
        if d > 0 {
            out.push(d);
        }
    }
    out.sort_unstable();
    Ok(out)
}

fn divide_exact(a: &Poly, b: &Poly, p: u64) -> Poly {
    let db = deg(b).unwrap();
    let mut r = a.clone();
    let mut q = vec![0u64; r.len() - db];
    let inv = pow_mod(*b.last().unwrap(), p - 2, p);
    for k in (0..q.len()).rev() {
        let c = mul_mod(r[k + db], inv, p);
        q[k] = c;
        for (i, &bc) in b.iter().enumerate() {
            r[k + i] = (r[k + i] + p - mul_mod(c, bc, p)) % p;
        }
    }
    debug_assert!(r.iter().all(|&c| c == 0));
    trim(&mut q);
    q
}

/// Root search followed by trial division by every monic quadratic.
pub fn factor_degrees_by_trial(f: &IntPolynomial, p: PrimeModulus) -> Result<Vec<usize>> {
    let q = p.get();
    let mut rest = monic(&prepare(f, p)?, q);
    let mut out = Vec::new();
    for r in 0..q {
        if rest.len() > 1 && eval(&rest, r, q) == 0 {
            rest = div_linear(&rest, r, q);
            out.push(1);
        }
    }
    match deg(&rest).unwrap_or(0) {
        0 => {}
        4 => {
            let has_quadratic = (0..q).any(|b| {
                (0..q).any(|c| {
                    let quad = vec![c, b, 1];
                    rem(&rest, &quad, q).is_empty()
                })
            });
            if has_quadratic {
                out.extend([2, 2]);
            } else {
                out.push(4);
            }
        }
        d => out.push(d),
    }
    out.sort_unstable();
    Ok(out)
}

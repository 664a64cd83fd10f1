//! Exact arithmetic in prime fields `F_p` with word-sized `p`.
//!
//! Elements carry their modulus, so values from different fields never mix
//! silently; mixing them is a programming error caught by `debug_assert!`.

mod poly;

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use poly::{factor_degrees, factor_degrees_by_ddf, factor_degrees_by_trial, IntPolynomial};

/// Primes of bad reduction for the threefold and its elliptic curve.
pub const BAD_PRIMES: [u64; 3] = [2, 5, 11];

/// A validated odd prime modulus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct PrimeModulus(u64);

impl PrimeModulus {
    /// Any odd prime below 2^63.
    pub fn new(p: u64) -> Result<Self> {
        if p < 3 || p >= 1 << 63 || !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(Self(p))
    }

    /// A prime of good reduction: odd, and not one of 5, 11.
    pub fn good(p: u64) -> Result<Self> {
        if BAD_PRIMES.contains(&p) {
            return Err(Error::BadPrime(p));
        }
        Self::new(p)
    }

    #[inline]
    pub fn get(self) -> u64 {
        self.0
    }

    pub fn is_good(self) -> bool {
        !BAD_PRIMES.contains(&self.0)
    }

    /// Rejects moduli for which the `u32` enumeration kernels could overflow.
    pub fn ensure_enumerable(self) -> Result<Self> {
        if self.0 >= 1 << 31 {
            return Err(Error::ModulusTooLarge(self.0));
        }
        Ok(self)
    }

    #[inline]
    pub fn elem(self, v: i64) -> Fp {
        Fp::from_i64(v, self)
    }

    #[inline]
    pub fn zero(self) -> Fp {
        Fp { value: 0, modulus: self }
    }

    #[inline]
    pub fn one(self) -> Fp {
        Fp { value: 1, modulus: self }
    }

    /// All field elements in increasing order of representative.
    pub fn elements(self) -> impl Iterator<Item = Fp> {
        (0..self.0).map(move |value| Fp { value, modulus: self })
    }
}

impl TryFrom<u64> for PrimeModulus {
    type Error = Error;
    fn try_from(p: u64) -> Result<Self> {
        Self::new(p)
    }
}

impl From<PrimeModulus> for u64 {
    fn from(p: PrimeModulus) -> u64 {
        p.0
    }
}

impl fmt::Display for PrimeModulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[inline]
pub(crate) fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub(crate) fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin; the witness set is exact for all `n < 3.3e24`.
pub fn is_prime(n: u64) -> bool {
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &w in &WITNESSES {
        if n % w == 0 {
            return n == w;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// An element of `F_p` in canonical form `0 <= value < p`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Fp {
    value: u64,
    modulus: PrimeModulus,
}

impl Fp {
    pub fn new(value: u64, modulus: PrimeModulus) -> Self {
        Self { value: value % modulus.0, modulus }
    }

    pub fn from_i64(v: i64, modulus: PrimeModulus) -> Self {
        let p = modulus.0 as i128;
        let value = (v as i128).rem_euclid(p) as u64;
        Self { value, modulus }
    }

    pub fn from_i128(v: i128, modulus: PrimeModulus) -> Self {
        let value = v.rem_euclid(modulus.0 as i128) as u64;
        Self { value, modulus }
    }

    #[inline]
    pub fn value(self) -> u64 {
        self.value
    }

    #[inline]
    pub fn modulus(self) -> PrimeModulus {
        self.modulus
    }

    /// Representative in `(-p/2, p/2]`, convenient for display.
    pub fn signed(self) -> i64 {
        let p = self.modulus.0;
        if self.value > p / 2 {
            self.value as i64 - p as i64
        } else {
            self.value as i64
        }
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    pub fn pow(self, exp: u64) -> Self {
        Self { value: pow_mod(self.value, exp, self.modulus.0), modulus: self.modulus }
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(self) -> Option<Self> {
        if self.value == 0 {
            None
        } else {
            Some(self.pow(self.modulus.0 - 2))
        }
    }

    /// Euler's criterion: `0` for zero, `1` for a nonzero square, `-1` otherwise.
    pub fn legendre(self) -> i8 {
        if self.value == 0 {
            return 0;
        }
        let p = self.modulus.0;
        if pow_mod(self.value, (p - 1) / 2, p) == 1 {
            1
        } else {
            -1
        }
    }

    /// The smaller of the two square roots, or `None` for a nonsquare.
    pub fn sqrt(self) -> Option<Self> {
        let p = self.modulus.0;
        match self.legendre() {
            0 => return Some(self),
            -1 => return None,
            _ => {}
        }
        // Tonelli-Shanks with the least quadratic nonresidue.
        let mut q = p - 1;
        let mut s = 0u32;
        while q % 2 == 0 {
            q /= 2;
            s += 1;
        }
        let z = (2..p)
            .find(|&c| Fp::new(c, self.modulus).legendre() == -1)
            .expect("odd prime has a nonresidue");
        let mut m = s;
        let mut c = pow_mod(z, q, p);
        let mut t = pow_mod(self.value, q, p);
        let mut r = pow_mod(self.value, (q + 1) / 2, p);
        while t != 1 {
            let mut i = 0;
            let mut t2 = t;
            while t2 != 1 {
                t2 = mul_mod(t2, t2, p);
                i += 1;
            }
            let b = pow_mod(c, 1 << (m - i - 1), p);
            m = i;
            c = mul_mod(b, b, p);
            t = mul_mod(t, c, p);
            r = mul_mod(r, b, p);
        }
        let r = r.min(p - r);
        Some(Self { value: r, modulus: self.modulus })
    }
}

impl fmt::Debug for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.value, self.modulus.0)
    }
}

impl fmt::Display for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl Add for Fp {
    type Output = Fp;
    #[inline]
    fn add(self, rhs: Fp) -> Fp {
        debug_assert_eq!(self.modulus, rhs.modulus);
        let p = self.modulus.0;
        let s = self.value + rhs.value;
        Fp { value: if s >= p { s - p } else { s }, modulus: self.modulus }
    }
}

impl Sub for Fp {
    type Output = Fp;
    #[inline]
    fn sub(self, rhs: Fp) -> Fp {
        debug_assert_eq!(self.modulus, rhs.modulus);
        let p = self.modulus.0;
        let value = if self.value >= rhs.value { self.value - rhs.value } else { self.value + p - rhs.value };
        Fp { value, modulus: self.modulus }
    }
}

impl Mul for Fp {
    type Output = Fp;
    #[inline]
    fn mul(self, rhs: Fp) -> Fp {
        debug_assert_eq!(self.modulus, rhs.modulus);
        Fp { value: mul_mod(self.value, rhs.value, self.modulus.0), modulus: self.modulus }
    }
}

impl Div for Fp {
    type Output = Fp;
    /// Panics on division by zero.
    fn div(self, rhs: Fp) -> Fp {
        self * rhs.inv().expect("division by zero in F_p")
    }
}

impl Neg for Fp {
    type Output = Fp;
    #[inline]
    fn neg(self) -> Fp {
        if self.value == 0 {
            self
        } else {
            Fp { value: self.modulus.0 - self.value, modulus: self.modulus }
        }
    }
}

impl AddAssign for Fp {
    fn add_assign(&mut self, rhs: Fp) {
        *self = *self + rhs;
    }
}

impl SubAssign for Fp {
    fn sub_assign(&mut self, rhs: Fp) {
        *self = *self - rhs;
    }
}

impl MulAssign for Fp {
    fn mul_assign(&mut self, rhs: Fp) {
        *self = *self * rhs;
    }
}

/// Legendre symbol of an integer modulo `p`.
pub fn legendre(a: Fp) -> i8 {
    a.legendre()
}

/// All primitive fifth roots of unity in `F_p`, in increasing order.
///
/// Empty unless `p = 1 (mod 5)`.
pub fn primitive_fifth_roots(p: PrimeModulus) -> Result<Vec<Fp>> {
    let p = PrimeModulus::good(p.get())?;
    if p.get() % 5 != 1 {
        return Ok(Vec::new());
    }
    let exp = (p.get() - 1) / 5;
    let eps = (2..p.get())
        .map(|g| Fp::new(g, p).pow(exp))
        .find(|e| e.value != 1)
        .expect("p = 1 mod 5 has an element of order 5");
    let mut roots: Vec<Fp> = (1..5).map(|k| eps.pow(k)).collect();
    roots.sort_by_key(|r| r.value);
    Ok(roots)
}

/// The smallest primitive fifth root of unity, if `p = 1 (mod 5)`.
pub fn fifth_root_of_unity(p: PrimeModulus) -> Result<Option<Fp>> {
    Ok(primitive_fifth_roots(p)?.into_iter().next())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(p: u64) -> PrimeModulus {
        PrimeModulus::new(p).unwrap()
    }

    fn squares_oracle(p: u64) -> Vec<u64> {
        let mut sq: Vec<u64> = (1..p).map(|a| a * a % p).collect();
        sq.sort_unstable();
        sq.dedup();
        sq
    }

    #[test]
    fn primality() {
        let small: Vec<u64> = (0..60).filter(|&n| is_prime(n)).collect();
        assert_eq!(small, [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59]);
        assert!(is_prime(2_305_843_009_213_693_951));
        assert!(!is_prime(3_215_031_751));
        assert!(PrimeModulus::new(9).is_err());
        assert!(PrimeModulus::new(2).is_err());
    }

    #[test]
    fn bad_primes_rejected() {
        for p in [5, 11] {
            assert!(matches!(PrimeModulus::good(p), Err(Error::BadPrime(q)) if q == p));
        }
        assert!(PrimeModulus::good(13).is_ok());
    }

    #[test]
    fn legendre_examples() {
        assert_eq!(m(31).elem(0).legendre(), 0);
        assert!(squares_oracle(31).contains(&5));
        assert_eq!(m(31).elem(5).legendre(), 1);
        assert!(!squares_oracle(13).contains(&5));
        assert_eq!(m(13).elem(5).legendre(), -1);
    }

    #[test]
    fn legendre_matches_enumeration() {
        for p in [3u64, 7, 13, 29, 31, 37, 83] {
            let sq = squares_oracle(p);
            for a in 1..p {
                let expected = if sq.binary_search(&a).is_ok() { 1 } else { -1 };
                assert_eq!(m(p).elem(a as i64).legendre(), expected, "a={a} p={p}");
            }
        }
    }

    #[test]
    fn sqrt_is_smaller_root() {
        let p = m(31);
        let r = p.elem(5).sqrt().unwrap();
        assert_eq!(r.value(), 6);
        assert!(p.elem(3).sqrt().is_none());
        for p in [m(41), m(89), m(113)] {
            for a in p.elements() {
                if let Some(r) = a.sqrt() {
                    assert_eq!(r * r, a);
                    assert!(r.value() <= p.get() - r.value() || r.is_zero());
                }
            }
        }
    }

    #[test]
    fn fifth_roots() {
        let eps = fifth_root_of_unity(m(31)).unwrap().unwrap();
        assert_eq!(eps.pow(5), m(31).one());
        assert_ne!(eps, m(31).one());
        assert!(fifth_root_of_unity(m(13)).unwrap().is_none());
        assert!(matches!(fifth_root_of_unity(m(11)), Err(Error::BadPrime(11))));
        for p in [11u64, 31, 41, 61, 71] {
            let Ok(p) = PrimeModulus::good(p) else { continue };
            let roots = primitive_fifth_roots(p).unwrap();
            assert_eq!(roots.len(), 4);
            let powers: Vec<Fp> = {
                let mut v: Vec<Fp> = (1..5).map(|k| roots[0].pow(k)).collect();
                v.sort_by_key(|r| r.value());
                v
            };
            assert_eq!(powers, roots);
        }
    }

    #[test]
    fn arithmetic_closure() {
        let p = m(37);
        for a in p.elements().skip(1) {
            assert_eq!(a * a.inv().unwrap(), p.one());
            assert_eq!(a + (-a), p.zero());
            assert_eq!((a - p.one()) + p.one(), a);
        }
        assert_eq!(p.elem(-1).value(), 36);
        assert_eq!(p.elem(-1).signed(), -1);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn legendre_multiplicative(a in 1u64..1000, b in 1u64..1000, idx in 0usize..6) {
                let p = m([13u64, 29, 31, 37, 43, 83][idx]);
                let (a, b) = (p.elem(a as i64), p.elem(b as i64));
                prop_assume!(!a.is_zero() && !b.is_zero());
                prop_assert_eq!((a * a).legendre(), 1);
                prop_assert_eq!((a * b).legendre(), a.legendre() * b.legendre());
            }
        }
    }
}

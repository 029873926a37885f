//! Scalar domains.
//!
//! Exact work happens over prime fields (the default) or the rationals. Binary
//! floating point is only used by the uniqueness lab. Elements do not carry
//! their field; every operation goes through a field context, so one generic
//! implementation of forms, schemes and elimination serves all three domains.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};

/// 2^62 - 57, the default certification prime.
pub const DEFAULT_PRIME: u64 = 4_611_686_018_427_387_847;
/// 2^62 - 87, used when a trial over the default prime is inconclusive.
pub const SECONDARY_PRIME: u64 = 4_611_686_018_427_387_817;

/// Range of the random integers used for points and forms over the rationals.
pub const SMALL_INT_BOUND: i64 = 9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Domain {
    Rational,
    Prime(u64),
    Float,
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Domain::Rational => write!(f, "Q"),
            Domain::Prime(p) => write!(f, "F_{p}"),
            Domain::Float => write!(f, "f64"),
        }
    }
}

/// A field context. Implementations are cheap to clone and immutable.
pub trait Field: Clone + Send + Sync {
    type Elem: Clone + PartialEq + fmt::Debug + Send + Sync;

    fn domain(&self) -> Domain;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_i64(&self, v: i64) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    /// `None` for zero.
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;
    fn is_zero(&self, a: &Self::Elem) -> bool;

    /// Uniform over a prime field, a small integer over the rationals, a
    /// standard normal over the floats.
    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::Elem;

    fn from_u64(&self, v: u64) -> Self::Elem {
        match i64::try_from(v) {
            Ok(v) => self.from_i64(v),
            Err(_) => {
                let hi = self.from_i64((v >> 32) as i64);
                let lo = self.from_i64((v & 0xffff_ffff) as i64);
                let shift = self.from_i64(1 << 32);
                self.add(&self.mul(&hi, &shift), &lo)
            }
        }
    }

    fn pow(&self, a: &Self::Elem, mut e: u32) -> Self::Elem {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    /// Exact rank of a matrix over this field.
    fn rank(&self, m: &Matrix<Self::Elem>) -> usize {
        linalg::gauss_rank(self, m)
    }
}

/// The prime field F_p for an odd prime p < 2^63.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        if !(3..1 << 63).contains(&p) || !is_prime_u64(p) {
            return Err(Error::InvalidPrime(p));
        }
        Ok(Self { p })
    }

    pub fn default_prime() -> Self {
        Self { p: DEFAULT_PRIME }
    }

    pub fn secondary_prime() -> Self {
        Self { p: SECONDARY_PRIME }
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    #[inline]
    fn reduce_i64(&self, v: i64) -> u64 {
        let r = (v as i128).rem_euclid(self.p as i128);
        r as u64
    }

    /// Lift to the symmetric range (-p/2, p/2].
    pub fn centered(&self, a: u64) -> i128 {
        if a > self.p / 2 {
            a as i128 - self.p as i128
        } else {
            a as i128
        }
    }
}

impl Field for PrimeField {
    type Elem = u64;

    fn domain(&self) -> Domain {
        Domain::Prime(self.p)
    }
    #[inline]
    fn zero(&self) -> u64 {
        0
    }
    #[inline]
    fn one(&self) -> u64 {
        1
    }
    fn from_i64(&self, v: i64) -> u64 {
        self.reduce_i64(v)
    }
    fn from_u64(&self, v: u64) -> u64 {
        v % self.p
    }
    #[inline]
    fn add(&self, a: &u64, b: &u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }
    #[inline]
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }
    #[inline]
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 * *b as u128) % self.p as u128) as u64
    }
    #[inline]
    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.p - a
        }
    }
    fn inv(&self, a: &u64) -> Option<u64> {
        if *a == 0 {
            return None;
        }
        Some(mod_inverse(*a, self.p))
    }
    #[inline]
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        rng.random_range(0..self.p)
    }
}

fn mod_inverse(a: u64, p: u64) -> u64 {
    let (mut old_r, mut r) = (a as i128, p as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    old_s.rem_euclid(p as i128) as u64
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, a, m);
        }
        a = mul_mod(a, a, m);
        e >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &w in &WITNESSES {
        if n.is_multiple_of(w) {
            return n == w;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'outer: for &a in &WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

/// The rationals, with arbitrary precision.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Rationals;

impl Field for Rationals {
    type Elem = BigRational;

    fn domain(&self) -> Domain {
        Domain::Rational
    }
    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn from_i64(&self, v: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(v))
    }
    fn from_u64(&self, v: u64) -> BigRational {
        BigRational::from_integer(BigInt::from(v))
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn inv(&self, a: &BigRational) -> Option<BigRational> {
        if a.is_zero() {
            None
        } else {
            Some(a.recip())
        }
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> BigRational {
        self.from_i64(rng.random_range(-SMALL_INT_BOUND..=SMALL_INT_BOUND))
    }

    /// Clears denominators row by row and runs fraction-free elimination.
    fn rank(&self, m: &Matrix<BigRational>) -> usize {
        let rows: Vec<Vec<BigInt>> = (0..m.rows())
            .map(|r| integer_row(m.row(r)))
            .collect();
        linalg::bareiss_rank(rows, m.cols())
    }
}

/// Scales a rational row by the lcm of its denominators.
pub fn integer_row(row: &[BigRational]) -> Vec<BigInt> {
    use num_integer::Integer;
    let lcm = row
        .iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    row.iter()
        .map(|x| x.numer() * (&lcm / x.denom()))
        .collect()
}

/// IEEE doubles. Not a field in the exact sense; used for numerical fitting.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Reals;

impl Field for Reals {
    type Elem = f64;

    fn domain(&self) -> Domain {
        Domain::Float
    }
    fn zero(&self) -> f64 {
        0.0
    }
    fn one(&self) -> f64 {
        1.0
    }
    fn from_i64(&self, v: i64) -> f64 {
        v as f64
    }
    fn from_u64(&self, v: u64) -> f64 {
        v as f64
    }
    fn add(&self, a: &f64, b: &f64) -> f64 {
        a + b
    }
    fn sub(&self, a: &f64, b: &f64) -> f64 {
        a - b
    }
    fn mul(&self, a: &f64, b: &f64) -> f64 {
        a * b
    }
    fn neg(&self, a: &f64) -> f64 {
        -a
    }
    fn inv(&self, a: &f64) -> Option<f64> {
        if *a == 0.0 {
            None
        } else {
            Some(1.0 / a)
        }
    }
    fn is_zero(&self, a: &f64) -> bool {
        *a == 0.0
    }
    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        StandardNormal.sample(rng)
    }
}

/// Converts a rational to the nearest double, saturating on overflow.
pub fn rational_to_f64(x: &BigRational) -> f64 {
    match (x.numer().to_f64(), x.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            if x.is_negative() {
                f64::NEG_INFINITY
            } else {
                f64::INFINITY
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_primes_are_prime_and_62_bit() {
        for p in [DEFAULT_PRIME, SECONDARY_PRIME] {
            assert!(is_prime_u64(p));
            assert_eq!(64 - p.leading_zeros(), 62);
        }
        assert!(PrimeField::new(DEFAULT_PRIME + 2).is_err());
        assert!(PrimeField::new(2).is_err());
        assert!(PrimeField::new(101).is_ok());
    }

    #[test]
    fn prime_field_inverse() {
        let f = PrimeField::default_prime();
        for a in [1u64, 2, 12345, DEFAULT_PRIME - 1] {
            let inv = f.inv(&a).unwrap();
            assert_eq!(f.mul(&a, &inv), 1);
        }
        assert_eq!(f.inv(&0), None);
        assert_eq!(f.from_i64(-1), DEFAULT_PRIME - 1);
        assert_eq!(f.centered(DEFAULT_PRIME - 3), -3);
    }

    #[test]
    fn from_u64_agrees_across_domains() {
        let v = u64::MAX - 5;
        let f = PrimeField::new(1_000_003).unwrap();
        assert_eq!(Field::from_u64(&f, v), v % 1_000_003);
        let q = Rationals;
        assert_eq!(Field::from_u64(&q, v), BigRational::from_integer(BigInt::from(v)));
    }
}

//! Dense univariate polynomials over F_p, coefficients lowest degree first.

use rand::Rng;

use crate::field::{Field, PrimeField};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UPoly(Vec<u64>);

impl UPoly {
    pub fn new(mut coeffs: Vec<u64>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Self(coeffs)
    }

    pub fn zero() -> Self {
        Self(Vec::new())
    }

    pub fn constant(c: u64) -> Self {
        Self::new(vec![c])
    }

    /// x - a
    pub fn linear_root(fp: &PrimeField, a: u64) -> Self {
        Self::new(vec![fp.neg(&a), 1])
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn lead(&self) -> u64 {
        *self.0.last().unwrap_or(&0)
    }

    pub fn eval(&self, fp: &PrimeField, x: u64) -> u64 {
        self.0
            .iter()
            .rev()
            .fold(0, |acc, c| fp.add(&fp.mul(&acc, &x), c))
    }

    pub fn add(&self, fp: &PrimeField, other: &Self) -> Self {
        let n = self.0.len().max(other.0.len());
        Self::new(
            (0..n)
                .map(|i| fp.add(self.0.get(i).unwrap_or(&0), other.0.get(i).unwrap_or(&0)))
                .collect(),
        )
    }

    pub fn sub(&self, fp: &PrimeField, other: &Self) -> Self {
        let n = self.0.len().max(other.0.len());
        Self::new(
            (0..n)
                .map(|i| fp.sub(self.0.get(i).unwrap_or(&0), other.0.get(i).unwrap_or(&0)))
                .collect(),
        )
    }

    pub fn mul(&self, fp: &PrimeField, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![0u64; self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if *a == 0 {
                continue;
            }
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] = fp.add(&out[i + j], &fp.mul(a, b));
            }
        }
        Self::new(out)
    }

    pub fn scale(&self, fp: &PrimeField, c: u64) -> Self {
        Self::new(self.0.iter().map(|a| fp.mul(a, &c)).collect())
    }

    pub fn monic(&self, fp: &PrimeField) -> Self {
        match fp.inv(&self.lead()) {
            Some(inv) => self.scale(fp, inv),
            None => Self::zero(),
        }
    }

    /// Quotient and remainder. Panics on division by zero.
    pub fn divrem(&self, fp: &PrimeField, divisor: &Self) -> (Self, Self) {
        let db = divisor.degree().expect("division by the zero polynomial");
        let inv = fp.inv(&divisor.lead()).expect("nonzero lead");
        let mut rem = self.0.clone();
        if rem.len() <= db {
            return (Self::zero(), self.clone());
        }
        let mut quot = vec![0u64; rem.len() - db];
        for k in (0..quot.len()).rev() {
            let c = fp.mul(&rem[k + db], &inv);
            quot[k] = c;
            if c == 0 {
                continue;
            }
            for (j, b) in divisor.0.iter().enumerate() {
                rem[k + j] = fp.sub(&rem[k + j], &fp.mul(&c, b));
            }
        }
        rem.truncate(db);
        (Self::new(quot), Self::new(rem))
    }

    pub fn rem(&self, fp: &PrimeField, divisor: &Self) -> Self {
        self.divrem(fp, divisor).1
    }

    pub fn derivative(&self, fp: &PrimeField) -> Self {
        Self::new(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| fp.mul(c, &fp.from_u64(i as u64)))
                .collect(),
        )
    }

    /// Monic gcd; gcd(0, 0) = 0.
    pub fn gcd(&self, fp: &PrimeField, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(fp, &b);
            a = b;
            b = r;
        }
        a.monic(fp)
    }

    /// `self^e mod modulus`.
    pub fn powmod(&self, fp: &PrimeField, mut e: u64, modulus: &Self) -> Self {
        let mut base = self.rem(fp, modulus);
        let mut acc = Self::constant(1).rem(fp, modulus);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(fp, &base).rem(fp, modulus);
            }
            base = base.mul(fp, &base).rem(fp, modulus);
            e >>= 1;
        }
        acc
    }

    /// Product of the distinct irreducible factors (valid while p exceeds the degree).
    pub fn squarefree_part(&self, fp: &PrimeField) -> Self {
        if self.degree().unwrap_or(0) == 0 {
            return self.monic(fp);
        }
        let g = self.gcd(fp, &self.derivative(fp));
        self.divrem(fp, &g).0.monic(fp)
    }

    /// The distinct roots in F_p, sorted.
    pub fn roots<R: Rng + ?Sized>(&self, fp: &PrimeField, rng: &mut R) -> Vec<u64> {
        if self.degree().unwrap_or(0) == 0 {
            return Vec::new();
        }
        let f = self.monic(fp);
        // gcd(f, x^p - x) keeps exactly the linear factors over F_p.
        let x = Self::new(vec![0, 1]);
        let xp = x.powmod(fp, fp.modulus(), &f);
        let split = f.gcd(fp, &xp.sub(fp, &x));
        let mut roots = Vec::new();
        split_linear(fp, &split, rng, &mut roots);
        roots.sort_unstable();
        roots.dedup();
        roots
    }
}

/// Equal-degree splitting of a product of distinct linear factors.
fn split_linear<R: Rng + ?Sized>(fp: &PrimeField, f: &UPoly, rng: &mut R, out: &mut Vec<u64>) {
    match f.degree() {
        None | Some(0) => {}
        Some(1) => {
            let c = f.monic(fp);
            out.push(fp.neg(&c.0[0]));
        }
        Some(deg) => loop {
            let a = fp.random(rng);
            let shifted = UPoly::new(vec![a, 1]);
            let h = shifted
                .powmod(fp, (fp.modulus() - 1) / 2, f)
                .sub(fp, &UPoly::constant(1));
            let g = f.gcd(fp, &h);
            let dg = g.degree().unwrap_or(0);
            if dg > 0 && dg < deg {
                split_linear(fp, &g, rng, out);
                split_linear(fp, &f.divrem(fp, &g).0, rng, out);
                return;
            }
        },
    }
}

/// The polynomial of degree < n through the n given points (distinct xs).
pub fn interpolate(fp: &PrimeField, xs: &[u64], ys: &[u64]) -> UPoly {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len();
    // Newton divided differences.
    let mut coef = ys.to_vec();
    for j in 1..n {
        for i in (j..n).rev() {
            let num = fp.sub(&coef[i], &coef[i - 1]);
            let den = fp.sub(&xs[i], &xs[i - j]);
            coef[i] = fp.mul(&num, &fp.inv(&den).expect("distinct nodes"));
        }
    }
    let mut acc = UPoly::zero();
    for i in (0..n).rev() {
        acc = acc
            .mul(fp, &UPoly::linear_root(fp, xs[i]))
            .add(fp, &UPoly::constant(coef[i]));
    }
    acc
}

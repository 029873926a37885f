//! Exact enumeration of the F_p-rational singular points of a plane curve.
//!
//! The curve is moved by a random projective change of coordinates, checked
//! for singularities on the line at infinity, and the affine part is
//! eliminated with resultants in y. Roots are found with Cantor-Zassenhaus.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Field, PrimeField};
use crate::forms::{DenseForm, ProjPoint};
use crate::interp::rng_from_seed;
use crate::linalg::{apply, determinant, Matrix};
use crate::upoly::{interpolate, UPoly};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SingularLocus {
    /// Normalized coordinates (first nonzero entry 1), sorted.
    pub points: Vec<Vec<u64>>,
    /// Coordinate changes drawn before a clean elimination.
    pub attempts: usize,
}

/// Polynomial in x, y with `c[a][b]` the coefficient of x^a y^b.
struct Bivariate {
    c: Vec<Vec<u64>>,
    deg: usize,
}

impl Bivariate {
    /// Dehomogenizes at the last coordinate.
    fn from_form(f: &DenseForm<u64>) -> Self {
        let deg = f.degree() as usize;
        let mut c = vec![vec![0u64; deg + 1]; deg + 1];
        for (mono, coeff) in f.basis().monomials().iter().zip(f.coeffs()) {
            c[mono.0[0] as usize][mono.0[1] as usize] = *coeff;
        }
        Self { c, deg }
    }

    /// The univariate polynomial in y at x = xi.
    fn at_x(&self, fp: &PrimeField, xi: u64) -> UPoly {
        let mut out = vec![0u64; self.deg + 1];
        let mut pow = 1u64;
        for row in &self.c {
            for (b, v) in row.iter().enumerate() {
                out[b] = fp.add(&out[b], &fp.mul(v, &pow));
            }
            pow = fp.mul(&pow, &xi);
        }
        UPoly::new(out)
    }

    /// Coefficient of y^deg, a constant.
    fn y_lead(&self) -> u64 {
        self.c[0][self.deg]
    }
}

fn sylvester_resultant(fp: &PrimeField, a: &UPoly, b: &UPoly) -> u64 {
    let (Some(n), Some(k)) = (a.degree(), b.degree()) else {
        return 0;
    };
    let size = n + k;
    if size == 0 {
        return 1;
    }
    let mut m = Matrix::filled(size, size, 0u64);
    for r in 0..k {
        for (j, c) in a.coeffs().iter().rev().enumerate() {
            m.set(r, r + j, *c);
        }
    }
    for r in 0..n {
        for (j, c) in b.coeffs().iter().rev().enumerate() {
            m.set(k + r, r + j, *c);
        }
    }
    determinant(fp, &m)
}

/// Res_y(a, b) as a polynomial in x, assuming both have constant y-leading
/// coefficients so the specialized degrees never drop.
fn resultant_in_y(fp: &PrimeField, a: &Bivariate, b: &Bivariate) -> UPoly {
    let bound = a.deg * b.deg;
    let xs: Vec<u64> = (1..=bound as u64 + 1).collect();
    let ys: Vec<u64> = xs
        .iter()
        .map(|&x| sylvester_resultant(fp, &a.at_x(fp, x), &b.at_x(fp, x)))
        .collect();
    interpolate(fp, &xs, &ys)
}

fn common_gcd(fp: &PrimeField, polys: &[UPoly]) -> UPoly {
    polys.iter().fold(UPoly::zero(), |acc, p| acc.gcd(fp, p))
}

fn normalize(fp: &PrimeField, p: &[u64]) -> Vec<u64> {
    ProjPoint(p.to_vec()).normalized(fp).0
}

enum Attempt {
    Done(Vec<Vec<u64>>),
    Retry,
}

fn attempt<R: Rng + ?Sized>(fp: &PrimeField, f: &DenseForm<u64>, rng: &mut R) -> Attempt {
    let a = Matrix::from_rows(3, (0..3).map(|_| (0..3).map(|_| fp.random(rng)).collect()).collect());
    if fp.is_zero(&determinant(fp, &a)) {
        return Attempt::Retry;
    }
    let g = f.substitute(fp, &a);
    let partials: Vec<DenseForm<u64>> = (0..3).map(|i| g.partial(fp, i)).collect();

    // Line at infinity y2 = 0: the point (1:0:0) and the points (x:1:0).
    if partials.iter().all(|p| p.evaluate(fp, &[1, 0, 0]) == 0) {
        return Attempt::Retry;
    }
    let at_infinity: Vec<UPoly> = partials
        .iter()
        .map(|p| {
            let deg = p.degree() as usize;
            let mut c = vec![0u64; deg + 1];
            for (mono, coeff) in p.basis().monomials().iter().zip(p.coeffs()) {
                if mono.0[2] == 0 {
                    c[mono.0[0] as usize] = *coeff;
                }
            }
            UPoly::new(c)
        })
        .collect();
    if common_gcd(fp, &at_infinity).degree() != Some(0) {
        return Attempt::Retry;
    }

    // Affine chart y2 = 1; by Euler, Sing = V(g, g_0, g_1) there.
    let curves = [
        Bivariate::from_form(&g),
        Bivariate::from_form(&partials[0]),
        Bivariate::from_form(&partials[1]),
    ];
    if curves.iter().any(|c| c.deg == 0 || c.y_lead() == 0) {
        return Attempt::Retry;
    }
    let resultants = [
        resultant_in_y(fp, &curves[0], &curves[1]),
        resultant_in_y(fp, &curves[0], &curves[2]),
        resultant_in_y(fp, &curves[1], &curves[2]),
    ];
    let h = common_gcd(fp, &resultants);
    if h.is_zero() {
        // A common component; the curve is not reduced.
        return Attempt::Retry;
    }
    let h = h.squarefree_part(fp);
    let xs = h.roots(fp, rng);
    if xs.len() != h.degree().unwrap_or(0) {
        // Conjugate x-coordinates cannot be inspected over F_p.
        return Attempt::Retry;
    }
    let mut points = Vec::new();
    for xi in xs {
        let fiber = common_gcd(fp, &curves.iter().map(|c| c.at_x(fp, xi)).collect::<Vec<_>>());
        if fiber.is_zero() {
            return Attempt::Retry;
        }
        let fiber = fiber.squarefree_part(fp);
        let ys = fiber.roots(fp, rng);
        if ys.len() != fiber.degree().unwrap_or(0) {
            return Attempt::Retry;
        }
        for eta in ys {
            points.push(normalize(fp, &apply(fp, &a, &[xi, eta, 1])));
        }
    }
    points.sort();
    points.dedup();
    Attempt::Done(points)
}

/// Enumerates Sing V(f) for a ternary form over F_p. Fails with
/// [`Error::Enumeration`] when no coordinate change within `max_attempts`
/// gives a clean elimination, which also covers non-reduced curves and
/// singular points defined only over an extension.
pub fn plane_singular_points(
    fp: &PrimeField,
    f: &DenseForm<u64>,
    seed: u64,
    max_attempts: usize,
) -> Result<SingularLocus> {
    if f.nvars() != 3 {
        return Err(Error::InvalidParams(format!(
            "singular enumeration needs a ternary form, got {} variables",
            f.nvars()
        )));
    }
    if f.degree() < 2 || f.is_zero(fp) {
        return Err(Error::InvalidParams("need a nonzero form of degree >= 2".into()));
    }
    let mut rng = rng_from_seed(seed);
    for i in 1..=max_attempts {
        if let Attempt::Done(points) = attempt(fp, f, &mut rng) {
            return Ok(SingularLocus { points, attempts: i });
        }
    }
    Err(Error::Enumeration(format!(
        "no clean elimination after {max_attempts} coordinate changes"
    )))
}

//! Dense homogeneous forms in the variables x_0, ..., x_m.
//!
//! Coefficients are stored in graded reverse-lexicographic order with
//! x_0 > x_1 > ... > x_m. Every matrix and serialized form in the crate uses
//! this order.

use std::cmp::Ordering;
use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Domain, Field};
use crate::linalg::Matrix;
use crate::params::monomial_count;

/// Exponent vector of a monomial.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MonomialIndex(pub Vec<u32>);

impl MonomialIndex {
    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    /// The exponent vector with a single 1 in position `i`.
    pub fn unit(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self(e)
    }
}

/// Grevlex comparison of two exponent vectors of equal degree: `a > b` iff
/// the last nonzero entry of `a - b` is negative.
pub fn grevlex_cmp(a: &[u32], b: &[u32]) -> Ordering {
    let da: u32 = a.iter().sum();
    let db: u32 = b.iter().sum();
    if da != db {
        return da.cmp(&db);
    }
    for (x, y) in a.iter().zip(b).rev() {
        if x != y {
            return y.cmp(x);
        }
    }
    Ordering::Equal
}

fn compositions(nvars: usize, degree: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if prefix.len() + 1 == nvars {
        let used: u32 = prefix.iter().sum();
        prefix.push(degree - used);
        out.push(prefix.clone());
        prefix.pop();
        return;
    }
    let used: u32 = prefix.iter().sum();
    for e in 0..=degree - used {
        prefix.push(e);
        compositions(nvars, degree, prefix, out);
        prefix.pop();
    }
}

/// All monomials of the given degree in `m + 1` variables, largest first.
pub fn monomial_basis(m: usize, degree: u32) -> Vec<MonomialIndex> {
    let mut out = Vec::with_capacity(monomial_count(m, degree));
    compositions(m + 1, degree, &mut Vec::with_capacity(m + 1), &mut out);
    out.sort_by(|a, b| grevlex_cmp(b, a));
    out.into_iter().map(MonomialIndex).collect()
}

/// The canonical basis together with a reverse lookup.
#[derive(Clone, Debug)]
pub struct MonomialBasis {
    nvars: usize,
    degree: u32,
    monomials: Vec<MonomialIndex>,
    position: HashMap<Vec<u32>, usize>,
}

impl MonomialBasis {
    pub fn new(nvars: usize, degree: u32) -> Self {
        let monomials = monomial_basis(nvars - 1, degree);
        let position = monomials
            .iter()
            .enumerate()
            .map(|(i, e)| (e.0.clone(), i))
            .collect();
        Self {
            nvars,
            degree,
            monomials,
            position,
        }
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn monomials(&self) -> &[MonomialIndex] {
        &self.monomials
    }

    pub fn index_of(&self, exps: &[u32]) -> Option<usize> {
        self.position.get(exps).copied()
    }
}

/// Coefficients of a linear form sum_i c_i x_i.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LinearForm<E>(pub Vec<E>);

impl<E: Clone> LinearForm<E> {
    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn coeffs(&self) -> &[E] {
        &self.0
    }

    pub fn variable<F: Field<Elem = E>>(field: &F, nvars: usize, i: usize) -> Self {
        let mut c = vec![field.zero(); nvars];
        c[i] = field.one();
        Self(c)
    }

    pub fn random<F: Field<Elem = E>, R: rand::Rng + ?Sized>(
        field: &F,
        nvars: usize,
        rng: &mut R,
    ) -> Self {
        Self((0..nvars).map(|_| field.random(rng)).collect())
    }

    pub fn eval<F: Field<Elem = E>>(&self, field: &F, point: &[E]) -> E {
        dot(field, &self.0, point)
    }

    pub fn is_zero<F: Field<Elem = E>>(&self, field: &F) -> bool {
        self.0.iter().all(|c| field.is_zero(c))
    }

    pub fn scaled<F: Field<Elem = E>>(&self, field: &F, c: &E) -> Self {
        Self(self.0.iter().map(|x| field.mul(x, c)).collect())
    }

    /// The point of P^m with the same coordinate vector.
    pub fn as_point(&self) -> ProjPoint<E> {
        ProjPoint(self.0.clone())
    }
}

/// A point of P^m given by homogeneous coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ProjPoint<E>(pub Vec<E>);

impl<E: Clone> ProjPoint<E> {
    pub fn coords(&self) -> &[E] {
        &self.0
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero<F: Field<Elem = E>>(&self, field: &F) -> bool {
        self.0.iter().all(|c| field.is_zero(c))
    }

    /// Projective equality: all 2x2 minors vanish.
    pub fn same_point<F: Field<Elem = E>>(&self, field: &F, other: &Self) -> bool {
        proportional(field, &self.0, &other.0)
    }

    /// Representative with first nonzero coordinate equal to one.
    pub fn normalized<F: Field<Elem = E>>(&self, field: &F) -> Self {
        match self.0.iter().find(|c| !field.is_zero(c)) {
            Some(lead) => {
                let inv = field.inv(lead).expect("nonzero");
                Self(self.0.iter().map(|c| field.mul(c, &inv)).collect())
            }
            None => self.clone(),
        }
    }

    pub fn as_linear_form(&self) -> LinearForm<E> {
        LinearForm(self.0.clone())
    }
}

/// True when `a` and `b` are linearly dependent (including when one is zero).
pub fn proportional<F: Field>(field: &F, a: &[F::Elem], b: &[F::Elem]) -> bool {
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            let minor = field.sub(&field.mul(&a[i], &b[j]), &field.mul(&a[j], &b[i]));
            if !field.is_zero(&minor) {
                return false;
            }
        }
    }
    true
}

pub fn dot<F: Field>(field: &F, a: &[F::Elem], b: &[F::Elem]) -> F::Elem {
    a.iter()
        .zip(b)
        .fold(field.zero(), |acc, (x, y)| field.add(&acc, &field.mul(x, y)))
}

/// Multinomial coefficient |e|! / prod e_i!.
pub fn multinomial(exps: &[u32]) -> u64 {
    let mut acc: u128 = 1;
    let mut total: u128 = 0;
    for &e in exps {
        for j in 1..=e as u128 {
            total += 1;
            acc = acc * total / j;
        }
    }
    u64::try_from(acc).expect("multinomial overflows u64")
}

/// prod_i c_i! / (c_i - a_i)!, the constant produced by differentiating x^c by a.
pub fn falling_factorial(c: &[u32], a: &[u32]) -> u64 {
    let mut acc: u64 = 1;
    for (&ci, &ai) in c.iter().zip(a) {
        for j in 0..ai {
            acc *= (ci - j) as u64;
        }
    }
    acc
}

/// Table `pow[i][e] = point[i]^e` for e up to `max_exp`.
pub fn power_table<F: Field>(field: &F, point: &[F::Elem], max_exp: u32) -> Vec<Vec<F::Elem>> {
    point
        .iter()
        .map(|x| {
            let mut row = Vec::with_capacity(max_exp as usize + 1);
            row.push(field.one());
            for e in 1..=max_exp as usize {
                let next = field.mul(&row[e - 1], x);
                row.push(next);
            }
            row
        })
        .collect()
}

/// Evaluates the monomial `exps` using a precomputed power table.
pub fn monomial_value<F: Field>(field: &F, powers: &[Vec<F::Elem>], exps: &[u32]) -> F::Elem {
    exps.iter()
        .enumerate()
        .fold(field.one(), |acc, (i, &e)| field.mul(&acc, &powers[i][e as usize]))
}

/// A homogeneous form of fixed degree, dense in the canonical monomial basis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DenseForm<E> {
    nvars: usize,
    degree: u32,
    domain: Domain,
    coeffs: Vec<E>,
}

impl<E: Clone> DenseForm<E> {
    pub fn zero<F: Field<Elem = E>>(field: &F, nvars: usize, degree: u32) -> Self {
        Self {
            nvars,
            degree,
            domain: field.domain(),
            coeffs: vec![field.zero(); monomial_count(nvars - 1, degree)],
        }
    }

    pub fn from_coeffs<F: Field<Elem = E>>(
        field: &F,
        nvars: usize,
        degree: u32,
        coeffs: Vec<E>,
    ) -> Result<Self> {
        let expected = monomial_count(nvars - 1, degree);
        if coeffs.len() != expected {
            return Err(Error::InvalidParams(format!(
                "form of degree {degree} in {nvars} variables needs {expected} coefficients, got {}",
                coeffs.len()
            )));
        }
        Ok(Self {
            nvars,
            degree,
            domain: field.domain(),
            coeffs,
        })
    }

    /// The monomial x^exps with coefficient one.
    pub fn monomial<F: Field<Elem = E>>(field: &F, exps: &[u32]) -> Self {
        let degree = exps.iter().sum();
        let basis = MonomialBasis::new(exps.len(), degree);
        let mut f = Self::zero(field, exps.len(), degree);
        f.coeffs[basis.index_of(exps).expect("monomial in basis")] = field.one();
        f
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn coeffs(&self) -> &[E] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<E> {
        self.coeffs
    }

    pub fn basis(&self) -> MonomialBasis {
        MonomialBasis::new(self.nvars, self.degree)
    }

    /// Coefficient of the monomial `exps`.
    pub fn coeff<F: Field<Elem = E>>(&self, field: &F, exps: &[u32]) -> E {
        match self.basis().index_of(exps) {
            Some(i) => self.coeffs[i].clone(),
            None => field.zero(),
        }
    }

    pub fn is_zero<F: Field<Elem = E>>(&self, field: &F) -> bool {
        self.coeffs.iter().all(|c| field.is_zero(c))
    }

    fn check_shape(&self, other: &Self) {
        assert_eq!(
            (self.nvars, self.degree),
            (other.nvars, other.degree),
            "forms of different shape"
        );
    }

    pub fn add<F: Field<Elem = E>>(&self, field: &F, other: &Self) -> Self {
        self.check_shape(other);
        Self {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| field.add(a, b))
                .collect(),
            ..self.clone()
        }
    }

    pub fn sub<F: Field<Elem = E>>(&self, field: &F, other: &Self) -> Self {
        self.check_shape(other);
        Self {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| field.sub(a, b))
                .collect(),
            ..self.clone()
        }
    }

    pub fn scale<F: Field<Elem = E>>(&self, field: &F, c: &E) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|a| field.mul(a, c)).collect(),
            ..self.clone()
        }
    }

    /// Product with a linear form.
    pub fn mul_linear<F: Field<Elem = E>>(&self, field: &F, l: &LinearForm<E>) -> Self {
        assert_eq!(l.nvars(), self.nvars);
        let src = self.basis();
        let dst = MonomialBasis::new(self.nvars, self.degree + 1);
        let mut out = Self::zero(field, self.nvars, self.degree + 1);
        let mut e = vec![0u32; self.nvars];
        for (mono, c) in src.monomials().iter().zip(&self.coeffs) {
            if field.is_zero(c) {
                continue;
            }
            for (i, li) in l.0.iter().enumerate() {
                if field.is_zero(li) {
                    continue;
                }
                e.copy_from_slice(&mono.0);
                e[i] += 1;
                let k = dst.index_of(&e).expect("monomial in basis");
                out.coeffs[k] = field.add(&out.coeffs[k], &field.mul(c, li));
            }
        }
        out
    }

    /// Full product of two forms.
    pub fn mul<F: Field<Elem = E>>(&self, field: &F, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars);
        let a = self.basis();
        let b = other.basis();
        let dst = MonomialBasis::new(self.nvars, self.degree + other.degree);
        let mut out = Self::zero(field, self.nvars, self.degree + other.degree);
        let mut e = vec![0u32; self.nvars];
        for (ma, ca) in a.monomials().iter().zip(&self.coeffs) {
            if field.is_zero(ca) {
                continue;
            }
            for (mb, cb) in b.monomials().iter().zip(&other.coeffs) {
                if field.is_zero(cb) {
                    continue;
                }
                for k in 0..self.nvars {
                    e[k] = ma.0[k] + mb.0[k];
                }
                let k = dst.index_of(&e).expect("monomial in basis");
                out.coeffs[k] = field.add(&out.coeffs[k], &field.mul(ca, cb));
            }
        }
        out
    }

    /// The mixed partial derivative by the multi-index `alpha`.
    pub fn derivative<F: Field<Elem = E>>(&self, field: &F, alpha: &MonomialIndex) -> Result<Self> {
        let order = alpha.degree();
        if alpha.nvars() != self.nvars || order > self.degree {
            return Err(Error::InvalidParams(format!(
                "cannot differentiate a degree-{} form by {:?}",
                self.degree, alpha.0
            )));
        }
        let src = self.basis();
        let dst = MonomialBasis::new(self.nvars, self.degree - order);
        let mut out = Self::zero(field, self.nvars, self.degree - order);
        let mut e = vec![0u32; self.nvars];
        for (mono, c) in src.monomials().iter().zip(&self.coeffs) {
            if field.is_zero(c) || mono.0.iter().zip(&alpha.0).any(|(m, a)| m < a) {
                continue;
            }
            for k in 0..self.nvars {
                e[k] = mono.0[k] - alpha.0[k];
            }
            let factor = field.from_u64(falling_factorial(&mono.0, &alpha.0));
            let k = dst.index_of(&e).expect("monomial in basis");
            out.coeffs[k] = field.add(&out.coeffs[k], &field.mul(c, &factor));
        }
        Ok(out)
    }

    /// dF/dx_i. Panics on a constant form.
    pub fn partial<F: Field<Elem = E>>(&self, field: &F, i: usize) -> Self {
        self.derivative(field, &MonomialIndex::unit(self.nvars, i))
            .expect("partial of a non-constant form")
    }

    /// Directional derivative sum_i u_i dF/dx_i.
    pub fn directional<F: Field<Elem = E>>(&self, field: &F, u: &[E]) -> Self {
        assert_eq!(u.len(), self.nvars);
        let mut out = Self::zero(field, self.nvars, self.degree - 1);
        for (i, ui) in u.iter().enumerate() {
            if field.is_zero(ui) {
                continue;
            }
            out = out.add(field, &self.partial(field, i).scale(field, ui));
        }
        out
    }

    pub fn evaluate<F: Field<Elem = E>>(&self, field: &F, point: &[E]) -> E {
        assert_eq!(point.len(), self.nvars, "point has wrong number of coordinates");
        let powers = power_table(field, point, self.degree);
        self.basis()
            .monomials()
            .iter()
            .zip(&self.coeffs)
            .filter(|(_, c)| !field.is_zero(c))
            .fold(field.zero(), |acc, (mono, c)| {
                field.add(&acc, &field.mul(c, &monomial_value(field, &powers, &mono.0)))
            })
    }

    /// The (m+1) x (m+1) matrix of second partials at `point`.
    pub fn hessian<F: Field<Elem = E>>(&self, field: &F, point: &[E]) -> Matrix<E> {
        let n = self.nvars;
        let mut h = Matrix::filled(n, n, field.zero());
        for i in 0..n {
            let di = self.partial(field, i);
            for j in i..n {
                let v = di.partial(field, j).evaluate(field, point);
                h.set(i, j, v.clone());
                h.set(j, i, v);
            }
        }
        h
    }

    /// The form y -> F(A y), where x_i = sum_j A[i][j] y_j.
    pub fn substitute<F: Field<Elem = E>>(&self, field: &F, a: &Matrix<E>) -> Self {
        assert_eq!((a.rows(), a.cols()), (self.nvars, self.nvars));
        let images: Vec<LinearForm<E>> = (0..self.nvars)
            .map(|i| LinearForm(a.row(i).to_vec()))
            .collect();
        // Powers of each image, built incrementally.
        let mut image_powers: Vec<Vec<DenseForm<E>>> = Vec::with_capacity(self.nvars);
        for l in &images {
            let mut pows = vec![Self::constant(field, self.nvars, field.one())];
            for k in 1..=self.degree as usize {
                let next = pows[k - 1].mul_linear(field, l);
                pows.push(next);
            }
            image_powers.push(pows);
        }
        let mut out = Self::zero(field, self.nvars, self.degree);
        for (mono, c) in self.basis().monomials().iter().zip(&self.coeffs) {
            if field.is_zero(c) {
                continue;
            }
            let mut term = Self::constant(field, self.nvars, c.clone());
            for (i, &e) in mono.0.iter().enumerate() {
                if e > 0 {
                    term = term.mul(field, &image_powers[i][e as usize]);
                }
            }
            out = out.add(field, &term);
        }
        out
    }

    pub fn constant<F: Field<Elem = E>>(field: &F, nvars: usize, c: E) -> Self {
        Self {
            nvars,
            degree: 0,
            domain: field.domain(),
            coeffs: vec![c],
        }
    }

    /// Coefficient-wise conversion into another domain.
    pub fn convert<G: Field>(&self, target: &G, f: impl Fn(&E) -> G::Elem) -> DenseForm<G::Elem> {
        DenseForm {
            nvars: self.nvars,
            degree: self.degree,
            domain: target.domain(),
            coeffs: self.coeffs.iter().map(f).collect(),
        }
    }
}

/// L^k, expanded with the multinomial theorem.
pub fn power_form<F: Field>(field: &F, l: &LinearForm<F::Elem>, k: u32) -> DenseForm<F::Elem> {
    let nvars = l.nvars();
    let basis = MonomialBasis::new(nvars, k);
    let powers = power_table(field, &l.0, k);
    let coeffs = basis
        .monomials()
        .iter()
        .map(|mono| {
            let c = field.from_u64(multinomial(&mono.0));
            field.mul(&c, &monomial_value(field, &powers, &mono.0))
        })
        .collect();
    DenseForm {
        nvars,
        degree: k,
        domain: field.domain(),
        coeffs,
    }
}

/// L^{d-1} M, a point of the tangent developable.
pub fn tangent_form<F: Field>(
    field: &F,
    l: &LinearForm<F::Elem>,
    m: &LinearForm<F::Elem>,
    d: u32,
) -> Result<DenseForm<F::Elem>> {
    if d < 2 {
        return Err(Error::InvalidParams(format!("tangent form needs d >= 2, got {d}")));
    }
    Ok(power_form(field, l, d - 1).mul_linear(field, m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{PrimeField, Rationals};
    use crate::params::binomial;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn basis_small_cases() {
        let b = monomial_basis(1, 2);
        assert_eq!(
            b,
            vec![
                MonomialIndex(vec![2, 0]),
                MonomialIndex(vec![1, 1]),
                MonomialIndex(vec![0, 2])
            ]
        );
        assert_eq!(monomial_basis(3, 0), vec![MonomialIndex(vec![0, 0, 0, 0])]);
        assert_eq!(monomial_basis(2, 7).len(), 36);
        let quad: Vec<Vec<u32>> = monomial_basis(2, 2).into_iter().map(|m| m.0).collect();
        assert_eq!(
            quad,
            vec![
                vec![2, 0, 0],
                vec![1, 1, 0],
                vec![0, 2, 0],
                vec![1, 0, 1],
                vec![0, 1, 1],
                vec![0, 0, 2]
            ]
        );
    }

    #[test]
    fn basis_sizes_and_uniqueness() {
        for m in 1..=5 {
            for deg in 0..=7 {
                let b = monomial_basis(m, deg);
                assert_eq!(b.len() as u64, binomial((m as u64) + deg as u64, m as u64));
                assert!(b.iter().all(|e| e.degree() == deg));
                let set: std::collections::HashSet<_> = b.iter().collect();
                assert_eq!(set.len(), b.len());
            }
        }
    }

    #[test]
    fn binomial_square() {
        let q = Rationals;
        let l = LinearForm(vec![q.one(), q.one()]);
        let sq = power_form(&q, &l, 2);
        let expect: Vec<_> = [1, 2, 1].iter().map(|&v| q.from_i64(v)).collect();
        assert_eq!(sq.coeffs(), &expect[..]);
    }

    #[test]
    fn pure_power_of_variable() {
        let q = Rationals;
        let x1 = LinearForm::variable(&q, 3, 1);
        let f = power_form(&q, &x1, 5);
        assert_eq!(f, DenseForm::monomial(&q, &[0, 5, 0]));
    }

    #[test]
    fn tangent_form_cases() {
        let q = Rationals;
        let x0 = LinearForm::variable(&q, 2, 0);
        let x1 = LinearForm::variable(&q, 2, 1);
        let f = tangent_form(&q, &x0, &x1, 3).unwrap();
        assert_eq!(f, DenseForm::monomial(&q, &[2, 1]));
        let l = LinearForm(vec![q.from_i64(2), q.from_i64(-3), q.from_i64(5)]);
        assert_eq!(tangent_form(&q, &l, &l, 4).unwrap(), power_form(&q, &l, 4));
        assert!(tangent_form(&q, &l, &l, 1).is_err());
    }

    #[test]
    fn evaluation_identities_over_prime_field() {
        let f = PrimeField::default_prime();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for m in 1..=4 {
            for d in [3u32, 5, 7] {
                let l = LinearForm::random(&f, m + 1, &mut rng);
                let mm = LinearForm::random(&f, m + 1, &mut rng);
                let pf = power_form(&f, &l, d);
                let tf = tangent_form(&f, &l, &mm, d).unwrap();
                for _ in 0..100 {
                    let p: Vec<u64> = (0..=m).map(|_| f.random(&mut rng)).collect();
                    let lp = l.eval(&f, &p);
                    assert_eq!(pf.evaluate(&f, &p), f.pow(&lp, d));
                    let expect = f.mul(&f.pow(&lp, d - 1), &mm.eval(&f, &p));
                    assert_eq!(tf.evaluate(&f, &p), expect);
                }
            }
        }
    }

    #[test]
    fn derivative_cases() {
        let q = Rationals;
        let f = DenseForm::monomial(&q, &[3, 0, 0]);
        let d = f.derivative(&q, &MonomialIndex(vec![2, 0, 0])).unwrap();
        assert_eq!(d, DenseForm::monomial(&q, &[1, 0, 0]).scale(&q, &q.from_i64(6)));
        assert_eq!(f.derivative(&q, &MonomialIndex(vec![0, 0, 0])).unwrap(), f);
        assert!(f.derivative(&q, &MonomialIndex(vec![4, 0, 0])).is_err());
    }

    fn random_form<F: Field, R: rand::Rng>(field: &F, nvars: usize, d: u32, rng: &mut R) -> DenseForm<F::Elem> {
        let n = monomial_count(nvars - 1, d);
        DenseForm::from_coeffs(field, nvars, d, (0..n).map(|_| field.random(rng)).collect()).unwrap()
    }

    fn euler_holds<F: Field>(field: &F, form: &DenseForm<F::Elem>) -> bool {
        let n = form.nvars();
        let mut acc = DenseForm::zero(field, n, form.degree());
        for i in 0..n {
            let xi = LinearForm::variable(field, n, i);
            acc = acc.add(field, &form.partial(field, i).mul_linear(field, &xi));
        }
        acc == form.scale(field, &field.from_i64(form.degree() as i64))
    }

    #[test]
    fn euler_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let fp = PrimeField::default_prime();
        for _ in 0..10 {
            assert!(euler_holds(&fp, &random_form(&fp, 3, 6, &mut rng)));
            assert!(euler_holds(&Rationals, &random_form(&Rationals, 4, 5, &mut rng)));
        }
    }

    #[test]
    fn derivatives_commute_and_are_linear() {
        let fp = PrimeField::default_prime();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let a = random_form(&fp, 3, 6, &mut rng);
            let b = random_form(&fp, 3, 6, &mut rng);
            let c = fp.random(&mut rng);
            assert_eq!(a.partial(&fp, 0).partial(&fp, 2), a.partial(&fp, 2).partial(&fp, 0));
            let mixed = a.derivative(&fp, &MonomialIndex(vec![1, 2, 1])).unwrap();
            let iterated = a.partial(&fp, 1).partial(&fp, 2).partial(&fp, 0).partial(&fp, 1);
            assert_eq!(mixed, iterated);
            let lhs = a.add(&fp, &b.scale(&fp, &c)).partial(&fp, 1);
            let rhs = a.partial(&fp, 1).add(&fp, &b.partial(&fp, 1).scale(&fp, &c));
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn evaluation_homogeneity() {
        let fp = PrimeField::default_prime();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let two = fp.from_i64(2);
        for _ in 0..10 {
            let f = random_form(&fp, 3, 7, &mut rng);
            let p: Vec<u64> = (0..3).map(|_| fp.random(&mut rng)).collect();
            let scaled: Vec<u64> = p.iter().map(|x| fp.mul(x, &two)).collect();
            assert_eq!(f.evaluate(&fp, &scaled), fp.mul(&fp.pow(&two, 7), &f.evaluate(&fp, &p)));
        }
        let q = Rationals;
        let x0d = DenseForm::monomial(&q, &[7, 0, 0]);
        assert_eq!(x0d.evaluate(&q, &[q.one(), q.zero(), q.zero()]), q.one());
        let l = LinearForm(vec![q.from_i64(1), q.from_i64(-1), q.from_i64(2)]);
        let p = [q.from_i64(1), q.from_i64(1), q.from_i64(0)];
        assert!(q.is_zero(&power_form(&q, &l, 7).evaluate(&q, &p)));
    }

    #[test]
    fn substitution_matches_evaluation() {
        let fp = PrimeField::default_prime();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let f = random_form(&fp, 3, 5, &mut rng);
        let a = Matrix::from_rows(3, (0..3).map(|_| (0..3).map(|_| fp.random(&mut rng)).collect()).collect());
        let g = f.substitute(&fp, &a);
        for _ in 0..5 {
            let y: Vec<u64> = (0..3).map(|_| fp.random(&mut rng)).collect();
            let x = crate::linalg::apply(&fp, &a, &y);
            assert_eq!(g.evaluate(&fp, &y), f.evaluate(&fp, &x));
        }
    }
}

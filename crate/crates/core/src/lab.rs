//! Planted decompositions f = L_{t-1}^{d-1} L_t + sum_{i<=t-2} L_i^d:
//! exact local identifiability and multi-start numerical recovery.
//!
//! Parameters theta are t blocks of m+1 coefficients, in the order
//! L_1, ..., L_{t-2}, L_{t-1}, L_t.

use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::certifier::gate_drip;
use crate::error::{Error, Result};
use crate::field::{Field, Rationals, Reals, SMALL_INT_BOUND};
use crate::forms::{multinomial, power_form, proportional, tangent_form, DenseForm, LinearForm, MonomialBasis};
use crate::interp::{derive_seed, rng_from_seed};
use crate::linalg::Matrix;
use crate::params::Params;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlantedInstance {
    pub params: Params,
    /// Integer coefficients of L_1, ..., L_t.
    pub forms: Vec<Vec<i64>>,
    pub f: DenseForm<BigRational>,
}

fn rational_forms(forms: &[Vec<i64>]) -> Vec<LinearForm<BigRational>> {
    forms
        .iter()
        .map(|l| LinearForm(l.iter().map(|&c| BigRational::from_integer(BigInt::from(c))).collect()))
        .collect()
}

/// Phi(L_1, ..., L_t) over any field.
pub fn phi<F: Field>(field: &F, forms: &[LinearForm<F::Elem>], d: u32) -> Result<DenseForm<F::Elem>> {
    let t = forms.len();
    if t < 2 {
        return Err(Error::InvalidParams(format!("need at least two linear forms, got {t}")));
    }
    let mut f = tangent_form(field, &forms[t - 2], &forms[t - 1], d)?;
    for l in &forms[..t - 2] {
        f = f.add(field, &power_form(field, l, d));
    }
    Ok(f)
}

impl PlantedInstance {
    /// Seeded integer plant inside the theorem range.
    pub fn plant(m: usize, d: u32, t: usize, seed: u64) -> Result<Self> {
        gate_drip(m, d, t, false)?;
        let mut rng = rng_from_seed(seed);
        let forms = loop {
            let forms: Vec<Vec<i64>> = (0..t)
                .map(|_| {
                    (0..=m)
                        .map(|_| rng.random_range(-SMALL_INT_BOUND..=SMALL_INT_BOUND))
                        .collect()
                })
                .collect();
            if pairwise_general(&forms) {
                break forms;
            }
        };
        Self::from_forms(m, d, forms)
    }

    /// Builds an instance from explicit forms without the range gate.
    pub fn from_forms(m: usize, d: u32, forms: Vec<Vec<i64>>) -> Result<Self> {
        let params = Params::new(m, d, Some(forms.len()))?;
        if forms.iter().any(|l| l.len() != m + 1) {
            return Err(Error::InvalidParams(format!("every form needs {} coefficients", m + 1)));
        }
        let f = phi(&Rationals, &rational_forms(&forms), d)?;
        Ok(Self { params, forms, f })
    }

    pub fn t(&self) -> usize {
        self.forms.len()
    }

    pub fn theta(&self) -> Vec<f64> {
        self.forms.iter().flatten().map(|&c| c as f64).collect()
    }

    pub fn f_float(&self) -> Vec<f64> {
        self.f.coeffs().iter().map(crate::field::rational_to_f64).collect()
    }
}

fn pairwise_general(forms: &[Vec<i64>]) -> bool {
    let field = Rationals;
    let rf = rational_forms(forms);
    if rf.iter().any(|l| l.is_zero(&field)) {
        return false;
    }
    (0..rf.len()).all(|i| (i + 1..rf.len()).all(|j| !proportional(&field, rf[i].coeffs(), rf[j].coeffs())))
}

/// The t(m+1) x C(m+d, m) matrix of partials of Phi at `forms`. Rows:
/// d L_i^{d-1} x_j for i <= t-2, then (d-1) L_{t-1}^{d-2} L_t x_j, then
/// L_{t-1}^{d-1} x_j.
pub fn parametrization_jacobian<F: Field>(
    field: &F,
    forms: &[LinearForm<F::Elem>],
    d: u32,
) -> Result<Matrix<F::Elem>> {
    let t = forms.len();
    if t < 2 || d < 2 {
        return Err(Error::InvalidParams("need t >= 2 and d >= 2".into()));
    }
    let nvars = forms[0].nvars();
    let cols = MonomialBasis::new(nvars, d).len();
    let mut rows = Vec::with_capacity(t * nvars);
    let mut push_block = |g: &DenseForm<F::Elem>| {
        for j in 0..nvars {
            rows.push(g.mul_linear(field, &LinearForm::variable(field, nvars, j)).into_coeffs());
        }
    };
    for l in &forms[..t - 2] {
        push_block(&power_form(field, l, d - 1).scale(field, &field.from_u64(d as u64)));
    }
    let (l, m) = (&forms[t - 2], &forms[t - 1]);
    push_block(
        &power_form(field, l, d - 2)
            .mul_linear(field, m)
            .scale(field, &field.from_u64(d as u64 - 1)),
    );
    push_block(&power_form(field, l, d - 1));
    Ok(Matrix::from_rows(cols, rows))
}

pub fn jacobian_rank(inst: &PlantedInstance) -> Result<usize> {
    let j = parametrization_jacobian(&Rationals, &rational_forms(&inst.forms), inst.params.d)?;
    Ok(Rationals.rank(&j))
}

/// Exact Jacobian rank equals t(m+1) - 1: the fiber of Phi near the
/// instance is the scaling symmetry alone.
pub fn local_identifiability(inst: &PlantedInstance) -> Result<bool> {
    Ok(jacobian_rank(inst)? + 1 == inst.t() * (inst.params.m + 1))
}

/// Phi and its Jacobian in doubles.
#[derive(Clone, Debug)]
pub struct FloatModel {
    m: usize,
    d: u32,
    t: usize,
    exps: Vec<Vec<u32>>,
    mult: Vec<f64>,
    /// For each monomial and variable j: multinomial of exps - e_j in degree d-1.
    mult_shift: Vec<Vec<f64>>,
}

impl FloatModel {
    pub fn new(m: usize, d: u32, t: usize) -> Result<Self> {
        Params::new(m, d, Some(t))?;
        if d < 2 {
            return Err(Error::InvalidParams("need d >= 2".into()));
        }
        let basis = MonomialBasis::new(m + 1, d);
        let exps: Vec<Vec<u32>> = basis.monomials().iter().map(|e| e.0.clone()).collect();
        let mult = exps.iter().map(|e| multinomial(e) as f64).collect();
        let mult_shift = exps
            .iter()
            .map(|e| {
                (0..=m)
                    .map(|j| {
                        if e[j] == 0 {
                            return 0.0;
                        }
                        let mut s = e.clone();
                        s[j] -= 1;
                        multinomial(&s) as f64
                    })
                    .collect()
            })
            .collect();
        Ok(Self {
            m,
            d,
            t,
            exps,
            mult,
            mult_shift,
        })
    }

    /// Phi in orthonormal tensor coordinates: coefficient / sqrt(multinomial).
    /// The Euclidean norm there is the Frobenius norm of the symmetric tensor.
    pub fn tensor_value(&self, theta: &[f64]) -> Vec<f64> {
        self.value(theta).iter().zip(&self.mult).map(|(c, w)| c / w.sqrt()).collect()
    }

    pub fn tensor_jacobian(&self, theta: &[f64]) -> DMatrix<f64> {
        let mut j = self.jacobian(theta);
        for (a, w) in self.mult.iter().enumerate() {
            j.row_mut(a).scale_mut(1.0 / w.sqrt());
        }
        j
    }

    pub fn to_tensor(&self, coeffs: &[f64]) -> Vec<f64> {
        coeffs.iter().zip(&self.mult).map(|(c, w)| c / w.sqrt()).collect()
    }

    pub fn n_params(&self) -> usize {
        self.t * (self.m + 1)
    }

    pub fn n_coeffs(&self) -> usize {
        self.exps.len()
    }

    fn block<'a>(&self, theta: &'a [f64], b: usize) -> &'a [f64] {
        &theta[b * (self.m + 1)..(b + 1) * (self.m + 1)]
    }

    fn powers(&self, l: &[f64]) -> Vec<Vec<f64>> {
        l.iter()
            .map(|&x| {
                let mut row = vec![1.0; self.d as usize + 1];
                for e in 1..row.len() {
                    row[e] = row[e - 1] * x;
                }
                row
            })
            .collect()
    }

    /// prod_k pw[k][e_k - shift_k], zero if any exponent goes negative.
    fn mono(pw: &[Vec<f64>], e: &[u32], shift: &[usize]) -> f64 {
        let mut acc = 1.0;
        for (k, &ek) in e.iter().enumerate() {
            let s = shift.iter().filter(|&&j| j == k).count() as u32;
            if ek < s {
                return 0.0;
            }
            acc *= pw[k][(ek - s) as usize];
        }
        acc
    }

    pub fn value(&self, theta: &[f64]) -> Vec<f64> {
        assert_eq!(theta.len(), self.n_params());
        let t = self.t;
        let pws: Vec<_> = (0..t - 2).map(|b| self.powers(self.block(theta, b))).collect();
        let pl = self.powers(self.block(theta, t - 2));
        let mvec = self.block(theta, t - 1);
        self.exps
            .iter()
            .enumerate()
            .map(|(a, e)| {
                let mut c: f64 = pws.iter().map(|pw| self.mult[a] * Self::mono(pw, e, &[])).sum();
                for (j, mj) in mvec.iter().enumerate() {
                    if e[j] > 0 {
                        c += mj * self.mult_shift[a][j] * Self::mono(&pl, e, &[j]);
                    }
                }
                c
            })
            .collect()
    }

    /// n_coeffs x n_params.
    pub fn jacobian(&self, theta: &[f64]) -> DMatrix<f64> {
        assert_eq!(theta.len(), self.n_params());
        let (t, n) = (self.t, self.m + 1);
        let mut jac = DMatrix::zeros(self.n_coeffs(), self.n_params());
        let pws: Vec<_> = (0..t - 2).map(|b| self.powers(self.block(theta, b))).collect();
        let pl = self.powers(self.block(theta, t - 2));
        let mvec = self.block(theta, t - 1);
        for (a, e) in self.exps.iter().enumerate() {
            for (b, pw) in pws.iter().enumerate() {
                for k in 0..n {
                    if e[k] > 0 {
                        jac[(a, b * n + k)] = self.mult[a] * e[k] as f64 * Self::mono(pw, e, &[k]);
                    }
                }
            }
            for j in 0..n {
                if e[j] == 0 {
                    continue;
                }
                let ms = self.mult_shift[a][j];
                jac[(a, (t - 1) * n + j)] = ms * Self::mono(&pl, e, &[j]);
                for k in 0..n {
                    let ek = e[k] - u32::from(k == j);
                    if ek > 0 {
                        jac[(a, (t - 2) * n + k)] += mvec[j] * ms * ek as f64 * Self::mono(&pl, e, &[j, k]);
                    }
                }
            }
        }
        jac
    }
}

/// Largest relative Frobenius error between the analytic Jacobian and
/// central differences over `samples` standard normal parameter vectors.
pub fn gradient_check(m: usize, d: u32, t: usize, seed: u64, samples: usize) -> Result<f64> {
    let model = FloatModel::new(m, d, t)?;
    let mut rng = rng_from_seed(seed);
    let h = 1e-5;
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let theta: Vec<f64> = (0..model.n_params()).map(|_| Reals.random(&mut rng)).collect();
        let analytic = model.jacobian(&theta);
        let mut fd = DMatrix::zeros(model.n_coeffs(), model.n_params());
        for p in 0..model.n_params() {
            let (mut plus, mut minus) = (theta.clone(), theta.clone());
            plus[p] += h;
            minus[p] -= h;
            let (vp, vm) = (model.value(&plus), model.value(&minus));
            for a in 0..model.n_coeffs() {
                fd[(a, p)] = (vp[a] - vm[a]) / (2.0 * h);
            }
        }
        let err = (&analytic - &fd).norm() / analytic.norm().max(f64::MIN_POSITIVE);
        worst = worst.max(err);
    }
    Ok(worst)
}

/// Canonical form of a decomposition under block permutations and the
/// scalings that leave Phi unchanged. Layout: for each power block (sorted
/// lexicographically) the unit direction u then the weight c^d; then the
/// tangent pair as unit u and M = c^{d-1} L_t.
pub fn canonicalize(theta: &[f64], m: usize, d: u32, t: usize) -> Result<Vec<f64>> {
    let n = m + 1;
    if theta.len() != t * n || t < 2 {
        return Err(Error::InvalidParams(format!(
            "expected {t} blocks of {n} coordinates, got {} values",
            theta.len()
        )));
    }
    let blocks: Vec<&[f64]> = theta.chunks(n).collect();
    let mut powers = Vec::with_capacity(t - 2);
    for b in &blocks[..t - 2] {
        let (u, c) = unit_direction(b)?;
        let mut entry = u;
        entry.push(c.powi(d as i32));
        powers.push(entry);
    }
    powers.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let (u, c) = unit_direction(blocks[t - 2])?;
    let scale = c.powi(d as i32 - 1);
    let mut out: Vec<f64> = powers.into_iter().flatten().collect();
    out.extend(u);
    out.extend(blocks[t - 1].iter().map(|x| x * scale));
    Ok(out)
}

/// Coordinates below this fraction of the norm do not decide the sign.
const SIGN_THRESHOLD: f64 = 1e-7;

/// (u, c) with L = c u, |u| = 1 and the first significant coordinate of u positive.
fn unit_direction(l: &[f64]) -> Result<(Vec<f64>, f64)> {
    let norm = l.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm <= 0.0 || !norm.is_finite() {
        return Err(Error::Degenerate("zero linear form in decomposition".into()));
    }
    let lead = l
        .iter()
        .find(|x| x.abs() > SIGN_THRESHOLD * norm)
        .copied()
        .unwrap_or(1.0);
    let c = if lead < 0.0 { -norm } else { norm };
    Ok((l.iter().map(|x| x / c).collect(), c))
}

/// A parameter vector with the given canonical form.
pub fn to_params(canonical: &[f64], m: usize, d: u32, t: usize) -> Result<Vec<f64>> {
    let n = m + 1;
    if canonical.len() != (t - 2) * (n + 1) + 2 * n {
        return Err(Error::InvalidParams("canonical vector has wrong length".into()));
    }
    let mut theta = Vec::with_capacity(t * n);
    for chunk in canonical[..(t - 2) * (n + 1)].chunks(n + 1) {
        let w = chunk[n];
        let c = if d % 2 == 1 {
            w.signum() * w.abs().powf(1.0 / d as f64)
        } else if w >= 0.0 {
            w.powf(1.0 / d as f64)
        } else {
            return Err(Error::Degenerate("negative weight for an even power".into()));
        };
        theta.extend(chunk[..n].iter().map(|x| x * c));
    }
    let tail = &canonical[(t - 2) * (n + 1)..];
    theta.extend_from_slice(&tail[..n]);
    theta.extend_from_slice(&tail[n..]);
    Ok(theta)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitConfig {
    pub restarts: usize,
    pub seed: u64,
    /// Residual below this counts as converged.
    pub tol: f64,
    /// Max-norm distance of canonical forms for a match.
    pub match_tol: f64,
    pub max_iters: usize,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            restarts: 50,
            seed: 0,
            tol: 1e-8,
            match_tol: 1e-6,
            max_iters: 500,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub restart: usize,
    pub params: Vec<f64>,
    pub residual: f64,
    pub converged: bool,
    pub matched: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecoveryResult {
    pub params: Params,
    pub restarts: usize,
    pub seed: u64,
    pub tol: f64,
    pub match_tol: f64,
    pub candidates: Vec<Candidate>,
    pub converged_count: usize,
    pub matched_count: usize,
    pub matched: bool,
    /// A converged fit that differs from the reference decomposition.
    pub red_alert: bool,
    pub inconclusive: bool,
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn unit_normalized(f: &[f64]) -> Result<(Vec<f64>, f64)> {
    let norm = f.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm <= 0.0 || !norm.is_finite() {
        return Err(Error::Degenerate("target form is zero".into()));
    }
    Ok((f.iter().map(|x| x / norm).collect(), norm))
}

/// Levenberg-Marquardt on |Phi(theta) - target| in tensor coordinates.
fn levenberg_marquardt(model: &FloatModel, target: &[f64], mut theta: Vec<f64>, cfg: &FitConfig) -> (Vec<f64>, f64) {
    let np = model.n_params();
    let stop = (cfg.tol * 1e-3).powi(2);
    let residual = |th: &[f64]| -> DVector<f64> {
        DVector::from_iterator(
            target.len(),
            model.tensor_value(th).into_iter().zip(target).map(|(a, b)| a - b),
        )
    };
    let mut r = residual(&theta);
    let mut cost = r.norm_squared();
    let mut lambda = 1e-3;
    for _ in 0..cfg.max_iters {
        if cost < stop {
            break;
        }
        let j = model.tensor_jacobian(&theta);
        let jt = j.transpose();
        let a = &jt * &j;
        let g = &jt * &r;
        let mut improved = false;
        while lambda < 1e12 {
            let mut damped = a.clone();
            for i in 0..np {
                damped[(i, i)] += lambda * (a[(i, i)] + 1e-12);
            }
            let Some(chol) = damped.cholesky() else {
                lambda *= 4.0;
                continue;
            };
            let step = chol.solve(&(-&g));
            let trial: Vec<f64> = theta.iter().zip(step.iter()).map(|(x, s)| x + s).collect();
            let rt = residual(&trial);
            let ct = rt.norm_squared();
            if ct.is_finite() && ct < cost {
                let scale = 1.0 + theta.iter().map(|x| x * x).sum::<f64>().sqrt();
                improved = step.norm() > 1e-15 * scale;
                theta = trial;
                r = rt;
                cost = ct;
                lambda = (lambda / 3.0).max(1e-12);
                break;
            }
            lambda *= 4.0;
        }
        if !improved {
            break;
        }
    }
    (theta, cost.sqrt())
}

/// Random start: every block uniform on the unit sphere, so all summands
/// start with comparable weight, then scaled so that |Phi(theta)| = 1.
fn random_start<R: Rng + ?Sized>(model: &FloatModel, rng: &mut R) -> Vec<f64> {
    let n = model.m + 1;
    let mut theta: Vec<f64> = (0..model.n_params()).map(|_| Reals.random(rng)).collect();
    for block in theta.chunks_mut(n) {
        let norm = block.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            block.iter_mut().for_each(|x| *x /= norm);
        }
    }
    let norm = model.tensor_value(&theta).iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 && norm.is_finite() {
        let s = norm.powf(-1.0 / model.d as f64);
        theta.iter_mut().for_each(|x| *x *= s);
    }
    theta
}

/// Multi-start fit of `target` (coefficients in the monomial basis) by a
/// t-term decomposition. Residuals are Frobenius norms of symmetric tensors
/// (coefficient / sqrt(multinomial)), with the target scaled to norm one. Converged candidates are compared with
/// `reference` after canonicalization, or with the first converged
/// candidate when no reference is given.
pub fn fit(
    target: &[f64],
    m: usize,
    d: u32,
    t: usize,
    cfg: &FitConfig,
    reference: Option<&[f64]>,
) -> Result<RecoveryResult> {
    if cfg.restarts == 0 {
        return Err(Error::InvalidParams("restarts must be >= 1".into()));
    }
    let model = FloatModel::new(m, d, t)?;
    if target.len() != model.n_coeffs() {
        return Err(Error::InvalidParams(format!(
            "target has {} coefficients, expected {}",
            target.len(),
            model.n_coeffs()
        )));
    }
    let (unit, norm) = unit_normalized(&model.to_tensor(target))?;
    let runs: Vec<(Vec<f64>, f64)> = (0..cfg.restarts)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_from_seed(derive_seed(cfg.seed, i as u64));
            let start = random_start(&model, &mut rng);
            levenberg_marquardt(&model, &unit, start, cfg)
        })
        .collect();

    // Reference decomposition of the unit target.
    let reference = match reference {
        Some(theta) => {
            let c = canonicalize(theta, m, d, t)?;
            Some(rescale_canonical(&c, m, t, 1.0 / norm))
        }
        None => None,
    };
    let mut reference = reference;
    let mut candidates = Vec::with_capacity(runs.len());
    for (restart, (params, residual)) in runs.into_iter().enumerate() {
        let converged = residual < cfg.tol;
        let mut matched = false;
        if converged {
            if let Ok(c) = canonicalize(&params, m, d, t) {
                let r = reference.get_or_insert_with(|| c.clone());
                matched = max_abs_diff(&c, r) < cfg.match_tol;
            }
        }
        candidates.push(Candidate {
            restart,
            params,
            residual,
            converged,
            matched,
        });
    }
    let converged_count = candidates.iter().filter(|c| c.converged).count();
    let matched_count = candidates.iter().filter(|c| c.matched).count();
    Ok(RecoveryResult {
        params: Params { m, d, t: Some(t) },
        restarts: cfg.restarts,
        seed: cfg.seed,
        tol: cfg.tol,
        match_tol: cfg.match_tol,
        candidates,
        converged_count,
        matched_count,
        matched: converged_count > 0 && matched_count == converged_count,
        red_alert: matched_count < converged_count,
        inconclusive: converged_count == 0,
    })
}

/// Multiplies the weights and M of a canonical vector by `s`.
fn rescale_canonical(c: &[f64], m: usize, t: usize, s: f64) -> Vec<f64> {
    let n = m + 1;
    let mut out = c.to_vec();
    for b in 0..t - 2 {
        out[b * (n + 1) + n] *= s;
    }
    let tail = (t - 2) * (n + 1) + n;
    for x in &mut out[tail..] {
        *x *= s;
    }
    out
}

/// Fits the plant and compares every converged fit with it.
pub fn recover(inst: &PlantedInstance, cfg: &FitConfig) -> Result<RecoveryResult> {
    let p = inst.params;
    fit(&inst.f_float(), p.m, p.d, inst.t(), cfg, Some(&inst.theta()))
}

/// Fits the plant with t - 1 summands, which should not converge.
pub fn adversarial_control(inst: &PlantedInstance, cfg: &FitConfig) -> Result<RecoveryResult> {
    let p = inst.params;
    fit(&inst.f_float(), p.m, p.d, inst.t() - 1, cfg, None)
}

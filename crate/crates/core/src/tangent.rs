//! Tangent spaces of the Veronese variety X and of its tangent developable
//! tau(X), and join dimensions through Terracini spans.
//!
//! Points of P^N are forms: [v^d] lies on X, [v^{d-1} u] on tau(X).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Field, PrimeField};
use crate::forms::{power_form, proportional, DenseForm, LinearForm, ProjPoint};
use crate::interp::{assemble, derive_seed, rank, rng_from_seed};
use crate::linalg::Matrix;
use crate::params::monomial_count;
use crate::schemes::{Component, FatPoint, SchemeUnion, TwoThreePoint};

/// A tangent vector of X: base point [v^d] and direction w. The line it spans
/// in P^N is {[v^{d-1}(a v + b w)]}.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TangentVectorNu<E> {
    pub base: LinearForm<E>,
    pub direction: LinearForm<E>,
}

impl<E: Clone> TangentVectorNu<E> {
    pub fn new<F: Field<Elem = E>>(field: &F, base: LinearForm<E>, direction: LinearForm<E>) -> Result<Self> {
        if base.nvars() != direction.nvars() {
            return Err(Error::InvalidParams("base and direction differ in length".into()));
        }
        if base.is_zero(field) || proportional(field, base.coeffs(), direction.coeffs()) {
            return Err(Error::Degenerate("tangent direction parallel to its base point".into()));
        }
        Ok(Self { base, direction })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrameLabel {
    XAtPoint,
    TauAtPoint,
}

/// Generators of an (affine cone over an) embedded tangent space.
#[derive(Clone, Debug, PartialEq)]
pub struct TangentFrame<E> {
    pub generators: Vec<DenseForm<E>>,
    pub label: FrameLabel,
}

impl<E: Clone> TangentFrame<E> {
    pub fn matrix(&self) -> Matrix<E> {
        stack(&[self])
    }
}

/// The generators of several frames as matrix rows.
pub fn stack<E: Clone>(frames: &[&TangentFrame<E>]) -> Matrix<E> {
    let cols = frames
        .iter()
        .flat_map(|f| f.generators.first())
        .map(|g| g.coeffs().len())
        .next()
        .unwrap_or(0);
    let rows = frames
        .iter()
        .flat_map(|f| f.generators.iter().map(|g| g.coeffs().to_vec()))
        .collect();
    Matrix::from_rows(cols, rows)
}

/// Affine rank of the span of the given frames.
pub fn affine_rank<F: Field>(field: &F, frames: &[&TangentFrame<F::Elem>]) -> usize {
    field.rank(&stack(frames))
}

/// T_{[v^d]} X, spanned by v^{d-1} x_i.
pub fn frame_x<F: Field>(field: &F, v: &LinearForm<F::Elem>, d: u32) -> Result<TangentFrame<F::Elem>> {
    if d < 2 {
        return Err(Error::InvalidParams(format!("tangent frame of X needs d >= 2, got {d}")));
    }
    if v.is_zero(field) {
        return Err(Error::Degenerate("zero linear form".into()));
    }
    let n = v.nvars();
    let head = power_form(field, v, d - 1);
    let generators = (0..n)
        .map(|i| head.mul_linear(field, &LinearForm::variable(field, n, i)))
        .collect();
    Ok(TangentFrame {
        generators,
        label: FrameLabel::XAtPoint,
    })
}

/// T_Q tau(X) at Q = [v^{d-1} w], spanned by v^{d-2} w x_i and v^{d-1} x_i.
pub fn frame_tau<F: Field>(field: &F, nu: &TangentVectorNu<F::Elem>, d: u32) -> Result<TangentFrame<F::Elem>> {
    if d < 3 {
        return Err(Error::InvalidParams(format!("tangent frame of tau(X) needs d >= 3, got {d}")));
    }
    let n = nu.base.nvars();
    let vw = power_form(field, &nu.base, d - 2).mul_linear(field, &nu.direction);
    let mut generators: Vec<_> = (0..n)
        .map(|i| vw.mul_linear(field, &LinearForm::variable(field, n, i)))
        .collect();
    generators.extend(frame_x(field, &nu.base, d)?.generators);
    Ok(TangentFrame {
        generators,
        label: FrameLabel::TauAtPoint,
    })
}

/// Random data for a point of tau(X, t): a tangent vector and t - 2 points of X.
#[derive(Clone, Debug, PartialEq)]
pub struct JoinSample<E> {
    pub nu: TangentVectorNu<E>,
    pub points: Vec<LinearForm<E>>,
}

impl<E: Clone> JoinSample<E> {
    /// The matching fat-point scheme Z(O, L) + sum 2P_i with O = [v],
    /// L = <v, w>, P_i = [v_i].
    pub fn dual_scheme<F: Field<Elem = E>>(&self, field: &F) -> Result<SchemeUnion<E>> {
        let mut components = vec![Component::TwoThree(TwoThreePoint::new(
            field,
            self.nu.base.as_point(),
            self.nu.direction.coeffs().to_vec(),
        )?)];
        for p in &self.points {
            components.push(Component::Fat(FatPoint::new(field, p.as_point(), 2)?));
        }
        SchemeUnion::new(field, self.nu.base.nvars(), components)
    }

    pub fn frames<F: Field<Elem = E>>(&self, field: &F, d: u32) -> Result<Vec<TangentFrame<E>>> {
        let mut out = vec![frame_tau(field, &self.nu, d)?];
        for p in &self.points {
            out.push(frame_x(field, p, d)?);
        }
        Ok(out)
    }

    pub fn supports(&self) -> Vec<ProjPoint<E>> {
        self.points.iter().map(LinearForm::as_point).collect()
    }
}

/// Draws a join sample; O, the P_i are pairwise distinct and w is independent of v.
pub fn sample_join<F: Field>(field: &F, m: usize, t: usize, seed: u64) -> Result<JoinSample<F::Elem>> {
    if t < 2 {
        return Err(Error::InvalidParams(format!("t must be >= 2, got {t}")));
    }
    let mut rng = rng_from_seed(seed);
    let nvars = m + 1;
    for _ in 0..64 {
        let v = LinearForm::random(field, nvars, &mut rng);
        let w = LinearForm::random(field, nvars, &mut rng);
        let points: Vec<_> = (0..t - 2).map(|_| LinearForm::random(field, nvars, &mut rng)).collect();
        let Ok(nu) = TangentVectorNu::new(field, v, w) else {
            continue;
        };
        let sample = JoinSample { nu, points };
        // Distinct supports and nonzero forms.
        if sample.dual_scheme(field).is_ok() {
            return Ok(sample);
        }
    }
    Err(Error::Distinctness(64))
}

fn sample_points<F: Field>(field: &F, m: usize, count: usize, seed: u64) -> Vec<LinearForm<F::Elem>> {
    let mut rng = rng_from_seed(seed);
    (0..count)
        .map(|_| loop {
            let l = LinearForm::random(field, m + 1, &mut rng);
            if !l.is_zero(field) {
                break l;
            }
        })
        .collect()
}

/// Projective dimension of the Terracini span of tau(X, t) at seeded random
/// points over the default prime. Lower-bounds dim tau(X, t).
pub fn join_dimension_tau(m: usize, d: u32, t: usize, seed: u64) -> Result<usize> {
    join_dimension_tau_over(&PrimeField::default_prime(), m, d, t, seed)
}

pub fn join_dimension_tau_over(field: &PrimeField, m: usize, d: u32, t: usize, seed: u64) -> Result<usize> {
    let sample = sample_join(field, m, t, seed)?;
    let frames = sample.frames(field, d)?;
    let refs: Vec<_> = frames.iter().collect();
    Ok(affine_rank(field, &refs) - 1)
}

/// Projective dimension of the Terracini span of sigma_t(X) at seeded
/// random points. `t = 1` gives X itself.
pub fn join_dimension_sigma(m: usize, d: u32, t: usize, seed: u64) -> Result<usize> {
    join_dimension_sigma_over(&PrimeField::default_prime(), m, d, t, seed)
}

pub fn join_dimension_sigma_over(field: &PrimeField, m: usize, d: u32, t: usize, seed: u64) -> Result<usize> {
    if t < 1 {
        return Err(Error::InvalidParams("t must be >= 1".into()));
    }
    let frames = sample_points(field, m, t, derive_seed(seed, 0x5167))
        .iter()
        .map(|v| frame_x(field, v, d))
        .collect::<Result<Vec<_>>>()?;
    let refs: Vec<_> = frames.iter().collect();
    Ok(affine_rank(field, &refs) - 1)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DualityOutcome {
    /// Terracini span dimension.
    pub primal_dim: usize,
    /// rank of the Z(O, L) + sum 2P_i condition matrix, minus one.
    pub dual_dim: usize,
}

impl DualityOutcome {
    pub fn holds(&self) -> bool {
        self.primal_dim == self.dual_dim
    }
}

/// Computes the Terracini span and the fat-point condition rank at the same
/// seeded data. Hyperplanes through T_P tau(X, t) are exactly the degree-d
/// forms in I_Z(d), so both dimensions agree.
pub fn duality_check(m: usize, d: u32, t: usize, seed: u64) -> Result<DualityOutcome> {
    let field = PrimeField::default_prime();
    let sample = sample_join(&field, m, t, seed)?;
    let frames = sample.frames(&field, d)?;
    let refs: Vec<_> = frames.iter().collect();
    let primal = affine_rank(&field, &refs);
    let scheme = sample.dual_scheme(&field)?;
    let dual = rank(&field, &assemble(&field, &scheme, d)?);
    debug_assert!(primal <= monomial_count(m, d));
    Ok(DualityOutcome {
        primal_dim: primal - 1,
        dual_dim: dual - 1,
    })
}

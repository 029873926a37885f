//! Condition matrices, exact ranks, h^0 / h^1 of I_Z(d), and randomized
//! generic-rank certificates.
//!
//! A certificate is one-sided evidence. The rank of an integer matrix over
//! F_p never exceeds its rank over Q, and the rank at a special point never
//! exceeds the generic rank, so hitting the expected maximal rank once proves
//! the generic statement in characteristic zero. Missing it proves nothing.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Domain, Field, PrimeField, DEFAULT_PRIME, SECONDARY_PRIME};
use crate::forms::{DenseForm, MonomialBasis};
use crate::linalg::{self, Matrix};
use crate::params::monomial_count;
use crate::schemes::{conditions, random_scheme, spec_degree, ComponentKind, SchemeUnion};

/// Recorded in every certificate.
pub const CHAR0_NOTE: &str =
    "rank over F_p of an integer condition matrix lower-bounds its rational rank; maximal rank at a random point certifies the generic characteristic-0 statement";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub scheme: Vec<ComponentKind>,
    pub domain: Domain,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// Rows are functionals, columns the degree-d monomial basis.
#[derive(Clone, Debug, PartialEq)]
pub struct ConditionMatrix<E> {
    pub matrix: Matrix<E>,
    pub provenance: Provenance,
}

impl<E: Clone> ConditionMatrix<E> {
    pub fn rows(&self) -> usize {
        self.matrix.rows()
    }
    pub fn cols(&self) -> usize {
        self.matrix.cols()
    }
}

pub fn assemble<F: Field>(field: &F, s: &SchemeUnion<F::Elem>, d: u32) -> Result<ConditionMatrix<F::Elem>> {
    let functionals = conditions(field, s, d)?;
    let basis = MonomialBasis::new(s.nvars(), d);
    let rows = functionals.iter().map(|f| f.row(field, &basis)).collect();
    Ok(ConditionMatrix {
        matrix: Matrix::from_rows(basis.len(), rows),
        provenance: Provenance {
            scheme: s.kinds(),
            domain: field.domain(),
            seed: None,
        },
    })
}

pub fn rank<F: Field>(field: &F, cm: &ConditionMatrix<F::Elem>) -> usize {
    field.rank(&cm.matrix)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cohomology {
    pub h0: usize,
    pub h1: usize,
    pub rank: usize,
    pub degree: usize,
}

/// h^0 = C(m+d, m) - rank and h^1 = deg S - rank.
pub fn cohomology<F: Field>(field: &F, s: &SchemeUnion<F::Elem>, d: u32) -> Result<Cohomology> {
    let cm = assemble(field, s, d)?;
    let r = rank(field, &cm);
    let degree = s.degree();
    debug_assert!(r <= degree, "a scheme never imposes more conditions than its length");
    Ok(Cohomology {
        h0: cm.cols() - r,
        h1: degree - r,
        rank: r,
        degree,
    })
}

/// A basis of H^0(I_S(d)) as forms.
pub fn kernel_forms<F: Field>(field: &F, s: &SchemeUnion<F::Elem>, d: u32) -> Result<Vec<DenseForm<F::Elem>>> {
    let cm = assemble(field, s, d)?;
    let basis = linalg::kernel_basis(field, &cm.matrix);
    if basis.is_empty() {
        return Err(Error::EmptySystem(cm.cols()));
    }
    basis
        .into_iter()
        .map(|v| DenseForm::from_coeffs(field, s.nvars(), d, v))
        .collect()
}

/// A uniformly random combination of the given forms.
pub fn random_combination<F: Field, R: rand::Rng + ?Sized>(
    field: &F,
    forms: &[DenseForm<F::Elem>],
    rng: &mut R,
) -> DenseForm<F::Elem> {
    let first = &forms[0];
    forms.iter().fold(DenseForm::zero(field, first.nvars(), first.degree()), |acc, f| {
        acc.add(field, &f.scale(field, &field.random(rng)))
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Certified,
    Inconclusive,
    /// Parameters outside the theorem's hypotheses; data only, no claim.
    OutOfRange,
}

impl Verdict {
    pub fn is_certified(&self) -> bool {
        matches!(self, Verdict::Certified)
    }
}

/// How random trials are drawn.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialPolicy {
    pub trials: usize,
    pub seed: u64,
    pub prime: u64,
    /// Retried with this prime whenever a trial misses the expected value.
    pub fallback_prime: Option<u64>,
}

impl Default for TrialPolicy {
    fn default() -> Self {
        Self {
            trials: 5,
            seed: 0,
            prime: DEFAULT_PRIME,
            fallback_prime: Some(SECONDARY_PRIME),
        }
    }
}

impl TrialPolicy {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    /// Same policy with `prime` as the main prime and the other default
    /// prime as fallback.
    pub fn with_prime(self, prime: u64) -> Self {
        let fallback = if prime == SECONDARY_PRIME {
            DEFAULT_PRIME
        } else {
            SECONDARY_PRIME
        };
        Self {
            prime,
            fallback_prime: self.fallback_prime.map(|_| fallback),
            ..self
        }
    }

    pub fn trial_seed(&self, i: usize) -> u64 {
        derive_seed(self.seed, i as u64)
    }

    pub(crate) fn fields(&self) -> Result<(PrimeField, Option<PrimeField>)> {
        if self.trials == 0 {
            return Err(Error::InvalidParams("trials must be >= 1".into()));
        }
        let main = PrimeField::new(self.prime)?;
        let fallback = self.fallback_prime.map(PrimeField::new).transpose()?;
        Ok((main, fallback))
    }
}

/// splitmix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Deterministic child seed `index` of `base`.
pub fn derive_seed(base: u64, index: u64) -> u64 {
    mix(base ^ mix(index))
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub seed: u64,
    pub prime: u64,
    pub rank: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub label: String,
    pub m: usize,
    pub d: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<usize>,
    pub scheme: Vec<ComponentKind>,
    pub scheme_degree: usize,
    pub trials: usize,
    pub prime: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fallback_prime: Option<u64>,
    pub seeds: Vec<u64>,
    pub attempts: Vec<TrialRecord>,
    pub achieved_rank: usize,
    pub expected_rank: usize,
    /// Hessian ranks at the double points of the certifying trial, when the
    /// certificate also checks node structure.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub hessian_ranks: Vec<usize>,
    pub verdict: Verdict,
    pub note: String,
}

impl Certificate {
    pub fn is_certified(&self) -> bool {
        self.verdict.is_certified()
    }
}

/// Outcome of one random trial: the rank reached plus whether any extra
/// checks attached to the trial passed.
pub(crate) struct TrialOutcome {
    pub rank: usize,
    pub extra_ok: bool,
    pub hessian_ranks: Vec<usize>,
}

/// Runs the trial protocol: up to `policy.trials` seeds, each retried over the
/// fallback prime when it misses; the first success stops the loop.
#[allow(clippy::too_many_arguments)]
pub(crate) fn run_trials(
    label: String,
    kinds: &[ComponentKind],
    m: usize,
    d: u32,
    t: Option<usize>,
    expected_rank: usize,
    policy: &TrialPolicy,
    trial: impl Fn(&PrimeField, u64) -> Result<TrialOutcome>,
) -> Result<Certificate> {
    let (main, fallback) = policy.fields()?;
    let mut seeds = Vec::new();
    let mut attempts = Vec::new();
    let mut achieved = 0;
    let mut verdict = Verdict::Inconclusive;
    let mut hessian_ranks = Vec::new();
    'trials: for i in 0..policy.trials {
        let seed = policy.trial_seed(i);
        seeds.push(seed);
        for field in std::iter::once(&main).chain(fallback.as_ref()) {
            let out = trial(field, seed)?;
            attempts.push(TrialRecord {
                seed,
                prime: field.modulus(),
                rank: out.rank,
            });
            achieved = achieved.max(out.rank);
            if out.rank == expected_rank && out.extra_ok {
                verdict = Verdict::Certified;
                hessian_ranks = out.hessian_ranks;
                break 'trials;
            }
        }
    }
    Ok(Certificate {
        label,
        m,
        d,
        t,
        scheme: kinds.to_vec(),
        scheme_degree: spec_degree(kinds, m),
        trials: policy.trials,
        prime: policy.prime,
        fallback_prime: policy.fallback_prime,
        seeds,
        attempts,
        achieved_rank: achieved,
        expected_rank,
        hessian_ranks,
        verdict,
        note: CHAR0_NOTE.to_string(),
    })
}

/// Certifies that a general union of the given components imposes
/// min(deg, C(m+d, m)) independent conditions on degree-d forms.
pub fn generic_rank_certificate(
    kinds: &[ComponentKind],
    m: usize,
    d: u32,
    policy: &TrialPolicy,
) -> Result<Certificate> {
    let expected = spec_degree(kinds, m).min(monomial_count(m, d));
    let label = format!(
        "rank[{}]",
        kinds.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
    );
    run_trials(label, kinds, m, d, None, expected, policy, |field, seed| {
        let s = random_scheme(field, kinds, m, seed)?;
        Ok(TrialOutcome {
            rank: rank(field, &assemble(field, &s, d)?),
            extra_ok: true,
            hessian_ranks: Vec::new(),
        })
    })
}

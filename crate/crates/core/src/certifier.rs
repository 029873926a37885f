//! Drivers for the h^1-vanishing lemmas, the 3O system, and drip
//! defectivity of tau(X, t) with its node and contact-line structure.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Field, PrimeField};
use crate::forms::{DenseForm, LinearForm, ProjPoint};
use crate::interp::{
    assemble, derive_seed, kernel_forms, random_combination, rank, rng_from_seed, run_trials, Certificate,
    TrialOutcome, TrialPolicy, Verdict, CHAR0_NOTE,
};
use crate::linalg::{apply, Matrix};
use crate::params::{binomial, monomial_count, ParameterTable, Params};
use crate::schemes::{apolar_pairing, random_scheme, spec_degree, ComponentKind};
use crate::singular::plane_singular_points;
use crate::tangent::{frame_tau, sample_join, TangentVectorNu};

/// Coordinate changes tried by the m = 2 enumeration before giving up.
pub const ENUMERATION_ATTEMPTS: usize = 12;
/// Random points u on the line <v, w> used by the contact-line check.
pub const CONTACT_SAMPLES: usize = 5;

fn hypothesis(msg: String) -> Error {
    Error::Hypothesis(msg)
}

/// m >= 2, d >= d_min, and d >= d_min + 1 when m <= 4.
fn gate_md(m: usize, d: u32, d_min: u32) -> Result<()> {
    if m < 2 {
        return Err(hypothesis(format!("m >= 2 required (got m={m})")));
    }
    if d < d_min {
        return Err(hypothesis(format!("d >= {d_min} required (got d={d})")));
    }
    if m <= 4 && d < d_min + 1 {
        return Err(hypothesis(format!(
            "m <= 4 requires d >= {} (got m={m}, d={d})",
            d_min + 1
        )));
    }
    Ok(())
}

pub fn gate_h1_triples(m: usize, d: u32) -> Result<()> {
    gate_md(m, d, 5)
}

pub fn gate_h1_quadruple(m: usize, d: u32) -> Result<()> {
    gate_md(m, d, 6)
}

pub fn gate_weak_3o(m: usize, d: u32, t: usize) -> Result<()> {
    Params::new(m, d, Some(t))?;
    if d < 3 {
        return Err(hypothesis(format!("d >= 3 required (got d={d})")));
    }
    let alpha = ParameterTable::new(m, d).alpha as usize;
    if t < 3 || t > alpha {
        return Err(hypothesis(format!("3 <= t <= alpha = {alpha} required (got t={t})")));
    }
    Ok(())
}

/// Theorem range for drip checks. Returns whether t lies inside it; t beyond
/// beta + 1 is accepted only when `allow_out_of_range` is set.
pub fn gate_drip(m: usize, d: u32, t: usize, allow_out_of_range: bool) -> Result<bool> {
    gate_h1_quadruple(m, d)?;
    let beta = ParameterTable::new(m, d).beta as usize;
    if t < 3 {
        return Err(hypothesis(format!("t >= 3 required (got t={t})")));
    }
    if t > beta + 1 {
        if allow_out_of_range {
            return Ok(false);
        }
        return Err(hypothesis(format!("t <= beta + 1 = {} required (got t={t})", beta + 1)));
    }
    Ok(true)
}

fn repeat(kind: ComponentKind, n: usize) -> impl Iterator<Item = ComponentKind> {
    std::iter::repeat_n(kind, n)
}

/// h^1 vanishing for i triple points and alpha - i double points, one
/// certificate for each i in {1, 2}.
pub fn certify_h1_triples(m: usize, d: u32, policy: &TrialPolicy) -> Result<Vec<Certificate>> {
    gate_h1_triples(m, d)?;
    (1..=2).map(|i| certify_h1_triples_i(m, d, i, policy)).collect()
}

pub fn certify_h1_triples_i(m: usize, d: u32, i: usize, policy: &TrialPolicy) -> Result<Certificate> {
    gate_h1_triples(m, d)?;
    let alpha = ParameterTable::new(m, d).alpha as usize;
    if i > alpha {
        return Err(hypothesis(format!("i <= alpha = {alpha} required (got i={i})")));
    }
    let kinds: Vec<_> = repeat(ComponentKind::TRIPLE, i)
        .chain(repeat(ComponentKind::DOUBLE, alpha - i))
        .collect();
    h1_certificate(format!("h1-triples i={i}"), &kinds, m, d, policy)
}

/// h^1 vanishing for one quadruple point and beta - 1 double points.
pub fn certify_h1_quadruple(m: usize, d: u32, policy: &TrialPolicy) -> Result<Certificate> {
    gate_h1_quadruple(m, d)?;
    let beta = ParameterTable::new(m, d).beta as usize;
    let kinds: Vec<_> = std::iter::once(ComponentKind::QUADRUPLE)
        .chain(repeat(ComponentKind::DOUBLE, beta.saturating_sub(1)))
        .collect();
    h1_certificate("h1-quadruple".into(), &kinds, m, d, policy)
}

/// h^1 vanishing for an arbitrary union: rank must equal the degree.
pub fn certify_h1_custom(kinds: &[ComponentKind], m: usize, d: u32, policy: &TrialPolicy) -> Result<Certificate> {
    Params::new(m, d, None)?;
    let label = format!(
        "h1[{}]",
        kinds.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
    );
    h1_certificate(label, kinds, m, d, policy)
}

fn h1_certificate(
    label: String,
    kinds: &[ComponentKind],
    m: usize,
    d: u32,
    policy: &TrialPolicy,
) -> Result<Certificate> {
    let expected = spec_degree(kinds, m);
    run_trials(label, kinds, m, d, None, expected, policy, |field, seed| {
        let s = random_scheme(field, kinds, m, seed)?;
        Ok(TrialOutcome {
            rank: rank(field, &assemble(field, &s, d)?),
            extra_ok: true,
            hessian_ranks: Vec::new(),
        })
    })
}

fn hessian_rank(field: &PrimeField, f: &DenseForm<u64>, point: &[u64]) -> usize {
    field.rank(&f.hessian(field, point))
}

/// General member of |I_Z(d)|, seeded.
fn general_member(field: &PrimeField, forms: &[DenseForm<u64>], seed: u64) -> DenseForm<u64> {
    random_combination(field, forms, &mut rng_from_seed(derive_seed(seed, 0xF0)))
}

/// 3O plus t - 2 double points O_i: rank equals degree and a general member
/// has Hessian rank m at each O_i.
pub fn certify_weak_3o(m: usize, d: u32, t: usize, policy: &TrialPolicy) -> Result<Certificate> {
    gate_weak_3o(m, d, t)?;
    let kinds: Vec<_> = std::iter::once(ComponentKind::TRIPLE)
        .chain(repeat(ComponentKind::DOUBLE, t - 2))
        .collect();
    let expected = spec_degree(&kinds, m);
    run_trials("weak-3O".into(), &kinds, m, d, Some(t), expected, policy, |field, seed| {
        let s = random_scheme(field, &kinds, m, seed)?;
        let r = rank(field, &assemble(field, &s, d)?);
        if r != expected || r == monomial_count(m, d) {
            return Ok(TrialOutcome {
                rank: r,
                extra_ok: false,
                hessian_ranks: Vec::new(),
            });
        }
        let f = general_member(field, &kernel_forms(field, &s, d)?, seed);
        let ranks: Vec<usize> = s.components()[1..]
            .iter()
            .map(|c| hessian_rank(field, &f, c.support().coords()))
            .collect();
        Ok(TrialOutcome {
            rank: r,
            extra_ok: ranks.iter().all(|&h| h == m),
            hessian_ranks: ranks,
        })
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeCheck {
    pub point: Vec<u64>,
    pub hessian_rank: usize,
    pub ok: bool,
}

/// Second- and third-order data of the general member at O.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OMultiplicity {
    pub hessian_rank: usize,
    pub kernel_contains_o: bool,
    pub kernel_contains_w: bool,
    /// (d_w)^3 F at O.
    pub third_order_value: u64,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SingEnumeration {
    pub points: Vec<Vec<u64>>,
    pub expected: Vec<Vec<u64>>,
    pub matches: bool,
    pub attempts: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Isolatedness {
    /// The whole singular locus was computed (m = 2).
    Enumerated,
    /// Hessian rank m - 1 and a nonzero third-order witness at O only.
    LocallyCertified,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DripReport {
    pub params: Params,
    pub in_theorem_range: bool,
    pub trials: usize,
    pub seeds: Vec<u64>,
    /// Prime and seed of the reported trial.
    pub prime: u64,
    pub seed: u64,
    pub rank: usize,
    pub expected_rank: usize,
    pub rank_ok: bool,
    pub node_checks: Vec<NodeCheck>,
    /// Chart-based Hessian rank at P_1 agrees with the projective one.
    pub chart_cross_check_ok: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub o_multiplicity: Option<OMultiplicity>,
    pub contact_line_ok: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sing_enumeration: Option<SingEnumeration>,
    pub isolatedness: Isolatedness,
    pub verdict: Verdict,
    pub note: String,
}

impl DripReport {
    pub fn is_certified(&self) -> bool {
        self.verdict.is_certified()
    }

    fn checks_pass(&self) -> bool {
        self.rank_ok
            && self.node_checks.iter().all(|n| n.ok)
            && self.chart_cross_check_ok
            && self.o_multiplicity.as_ref().is_some_and(|o| o.ok)
            && self.contact_line_ok
            && self.sing_enumeration.as_ref().is_none_or(|s| s.matches)
    }
}

fn is_zero_vec(v: &[u64]) -> bool {
    v.iter().all(|&x| x == 0)
}

/// Hessian rank in the affine chart x_j = 1, j the first nonzero coordinate.
fn chart_hessian_rank(field: &PrimeField, f: &DenseForm<u64>, point: &[u64]) -> usize {
    let p = ProjPoint(point.to_vec()).normalized(field).0;
    let j = p.iter().position(|&x| x != 0).expect("nonzero point");
    let keep: Vec<usize> = (0..p.len()).filter(|&i| i != j).collect();
    // Second partials of the dehomogenized form are those of F on the chart.
    let h = f.hessian(field, &p);
    let sub = Matrix::from_rows(
        keep.len(),
        keep.iter().map(|&r| keep.iter().map(|&c| *h.get(r, c)).collect()).collect(),
    );
    field.rank(&sub)
}

fn drip_trial(field: &PrimeField, m: usize, d: u32, t: usize, seed: u64) -> Result<DripReport> {
    let sample = sample_join(field, m, t, seed)?;
    let scheme = sample.dual_scheme(field)?;
    let expected = t * (m + 1) - 1;
    let r = rank(field, &assemble(field, &scheme, d)?);
    let v = sample.nu.base.coeffs().to_vec();
    let w = sample.nu.direction.coeffs().to_vec();
    let mut report = DripReport {
        params: Params { m, d, t: Some(t) },
        in_theorem_range: true,
        trials: 0,
        seeds: Vec::new(),
        prime: field.modulus(),
        seed,
        rank: r,
        expected_rank: expected,
        rank_ok: r == expected,
        node_checks: Vec::new(),
        chart_cross_check_ok: false,
        o_multiplicity: None,
        contact_line_ok: false,
        sing_enumeration: None,
        isolatedness: if m == 2 {
            Isolatedness::Enumerated
        } else {
            Isolatedness::LocallyCertified
        },
        verdict: Verdict::Inconclusive,
        note: CHAR0_NOTE.to_string(),
    };
    if r >= monomial_count(m, d) {
        return Ok(report);
    }
    let f = general_member(field, &kernel_forms(field, &scheme, d)?, seed);

    // (2) ordinary nodes at the P_k.
    for p in &sample.points {
        let h = hessian_rank(field, &f, p.coeffs());
        report.node_checks.push(NodeCheck {
            point: ProjPoint(p.coeffs().to_vec()).normalized(field).0,
            hessian_rank: h,
            ok: h == m,
        });
    }
    report.chart_cross_check_ok = match (sample.points.first(), report.node_checks.first()) {
        (Some(p), Some(node)) => chart_hessian_rank(field, &f, p.coeffs()) == node.hessian_rank,
        _ => true,
    };

    // (3) data at O.
    let h_o = f.hessian(field, &v);
    let hr = field.rank(&h_o);
    let third = f
        .directional(field, &w)
        .directional(field, &w)
        .directional(field, &w)
        .evaluate(field, &v);
    let kernel_contains_o = is_zero_vec(&apply(field, &h_o, &v));
    let kernel_contains_w = is_zero_vec(&apply(field, &h_o, &w));
    report.o_multiplicity = Some(OMultiplicity {
        hessian_rank: hr,
        kernel_contains_o,
        kernel_contains_w,
        third_order_value: third,
        ok: hr + 1 == m && kernel_contains_o && kernel_contains_w && third != 0,
    });

    // (4) F is apolar to T_{[v^{d-1} u]} tau(X) for u on the line <v, w>.
    let mut rng = rng_from_seed(derive_seed(seed, 0xC0));
    let mut contact_ok = true;
    let mut samples = 0;
    while samples < CONTACT_SAMPLES {
        let (a, b) = (field.random(&mut rng), field.random(&mut rng));
        if b == 0 {
            continue;
        }
        samples += 1;
        let u: Vec<u64> = v
            .iter()
            .zip(&w)
            .map(|(x, y)| field.add(&field.mul(&a, x), &field.mul(&b, y)))
            .collect();
        let nu = TangentVectorNu::new(field, sample.nu.base.clone(), LinearForm(u))?;
        let frame = frame_tau(field, &nu, d)?;
        contact_ok &= frame
            .generators
            .iter()
            .all(|g| apolar_pairing(field, &f, g) == 0);
    }
    report.contact_line_ok = contact_ok;

    // (5) the whole singular locus in the plane.
    if m == 2 {
        let mut expected_points: Vec<Vec<u64>> = sample
            .points
            .iter()
            .map(|p| ProjPoint(p.coeffs().to_vec()).normalized(field).0)
            .chain(std::iter::once(ProjPoint(v.clone()).normalized(field).0))
            .collect();
        expected_points.sort();
        report.sing_enumeration = Some(
            match plane_singular_points(field, &f, derive_seed(seed, 0x5E), ENUMERATION_ATTEMPTS) {
                Ok(locus) => SingEnumeration {
                    matches: locus.points == expected_points,
                    points: locus.points,
                    expected: expected_points,
                    attempts: locus.attempts,
                    error: None,
                },
                Err(e) => SingEnumeration {
                    points: Vec::new(),
                    expected: expected_points,
                    matches: false,
                    attempts: ENUMERATION_ATTEMPTS,
                    error: Some(e.to_string()),
                },
            },
        );
    }
    if report.checks_pass() {
        report.verdict = Verdict::Certified;
    }
    Ok(report)
}

/// Drip-defectivity and node structure of tau(X, t) at seeded random data.
/// Outside the theorem range (only with `allow_out_of_range`) the checks
/// still run but the verdict is `OutOfRange`.
pub fn certify_drip(
    m: usize,
    d: u32,
    t: usize,
    policy: &TrialPolicy,
    allow_out_of_range: bool,
) -> Result<DripReport> {
    let in_range = gate_drip(m, d, t, allow_out_of_range)?;
    let (main, fallback) = policy.fields()?;
    let mut seeds = Vec::new();
    let mut last = None;
    'trials: for i in 0..policy.trials {
        let seed = policy.trial_seed(i);
        seeds.push(seed);
        for field in std::iter::once(&main).chain(fallback.as_ref()) {
            let report = drip_trial(field, m, d, t, seed)?;
            let done = report.is_certified();
            last = Some(report);
            if done {
                break 'trials;
            }
        }
    }
    let mut report = last.expect("at least one trial");
    report.trials = policy.trials;
    report.seeds = seeds;
    report.in_theorem_range = in_range;
    if !in_range {
        report.verdict = Verdict::OutOfRange;
    }
    Ok(report)
}

/// Runs `certify_drip` over (m, d, t) cells concurrently; results keep the
/// order of `cells`.
pub fn certify_drip_grid(
    cells: &[(usize, u32, usize)],
    policy: &TrialPolicy,
    allow_out_of_range: bool,
) -> Vec<Result<DripReport>> {
    cells
        .par_iter()
        .map(|&(m, d, t)| certify_drip(m, d, t, policy, allow_out_of_range))
        .collect()
}

/// Degree of i triple points plus alpha - i double points.
pub fn triples_degree(m: usize, d: u32, i: usize) -> usize {
    let alpha = ParameterTable::new(m, d).alpha as usize;
    i * binomial(m as u64 + 2, m as u64) as usize + (alpha - i) * (m + 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn policy() -> TrialPolicy {
        TrialPolicy::with_seed(11)
    }

    #[test]
    fn triples_gate_and_degrees() {
        assert!(matches!(certify_h1_triples(2, 5, &policy()), Err(Error::Hypothesis(_))));
        assert!(matches!(certify_h1_triples(1, 9, &policy()), Err(Error::Hypothesis(_))));
        let certs = certify_h1_triples(2, 6, &policy()).unwrap();
        assert_eq!(certs.iter().map(|c| c.scheme_degree).collect::<Vec<_>>(), vec![24, 27]);
        assert!(certs.iter().all(Certificate::is_certified));
        assert_eq!(triples_degree(5, 5, 2), 156);
    }

    #[test]
    fn quadruple_certificates() {
        assert!(matches!(certify_h1_quadruple(2, 6, &policy()), Err(Error::Hypothesis(_))));
        let c = certify_h1_quadruple(2, 7, &policy()).unwrap();
        assert_eq!((c.achieved_rank, c.verdict), (28, Verdict::Certified));
        let c = certify_h1_quadruple(3, 7, &policy()).unwrap();
        assert_eq!((c.scheme_degree, c.verdict), (72, Verdict::Certified));
    }

    #[test]
    fn weak_3o_cases() {
        assert!(matches!(certify_weak_3o(2, 7, 2, &policy()), Err(Error::Hypothesis(_))));
        assert!(matches!(certify_weak_3o(2, 7, 10, &policy()), Err(Error::Hypothesis(_))));
        // 3O plus t - 2 = 7 double points: 6 + 7 * 3.
        let c = certify_weak_3o(2, 7, 9, &policy()).unwrap();
        assert_eq!(c.scheme_degree, 27);
        assert!(c.is_certified());
        assert_eq!(c.hessian_ranks, vec![2; 7]);
        let c = certify_weak_3o(5, 6, 3, &policy()).unwrap();
        assert_eq!((c.achieved_rank, c.verdict), (27, Verdict::Certified));
    }

    #[test]
    fn drip_plane_t3() {
        let r = certify_drip(2, 7, 3, &policy(), false).unwrap();
        assert_eq!(r.rank, 8);
        assert_eq!(r.node_checks.len(), 1);
        assert_eq!(r.node_checks[0].hessian_rank, 2);
        let o = r.o_multiplicity.as_ref().unwrap();
        assert_eq!(o.hessian_rank, 1);
        assert_ne!(o.third_order_value, 0);
        let sing = r.sing_enumeration.as_ref().unwrap();
        assert_eq!(sing.points.len(), 2);
        assert!(sing.matches);
        assert_eq!(r.isolatedness, Isolatedness::Enumerated);
        assert!(r.is_certified(), "{r:?}");
    }

    #[test]
    fn drip_range_gate() {
        // beta(2,7) = 7.
        let r = certify_drip(2, 7, 8, &policy(), false).unwrap();
        assert_eq!((r.rank, r.verdict), (23, Verdict::Certified));
        assert!(matches!(certify_drip(2, 7, 9, &policy(), false), Err(Error::Hypothesis(_))));
        let r = certify_drip(2, 7, 9, &policy(), true).unwrap();
        assert_eq!(r.verdict, Verdict::OutOfRange);
        assert!(!r.in_theorem_range);
        assert!(matches!(certify_drip(2, 6, 3, &policy(), false), Err(Error::Hypothesis(_))));
    }

    #[test]
    fn drip_higher_dimension_is_local() {
        let r = certify_drip(3, 7, 4, &policy(), false).unwrap();
        assert_eq!(r.isolatedness, Isolatedness::LocallyCertified);
        assert!(r.sing_enumeration.is_none());
        assert_eq!(r.o_multiplicity.as_ref().unwrap().hessian_rank, 2);
        assert!(r.is_certified());
    }

    #[test]
    fn chart_rank_matches_projective_rank_at_a_node() {
        let field = PrimeField::default_prime();
        // xy z^2 has a node at (0:0:1).
        let f = DenseForm::monomial(&field, &[1, 1, 2]);
        assert_eq!(chart_hessian_rank(&field, &f, &[0, 0, 5]), 2);
        assert_eq!(hessian_rank(&field, &f, &[0, 0, 5]), 2);
    }

    #[test]
    fn grid_keeps_order() {
        let cells = [(2, 7, 4), (2, 7, 3)];
        let out = certify_drip_grid(&cells, &policy(), false);
        let ts: Vec<_> = out.iter().map(|r| r.as_ref().unwrap().params.t).collect();
        assert_eq!(ts, vec![Some(4), Some(3)]);
    }
}

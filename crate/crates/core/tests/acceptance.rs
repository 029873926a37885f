//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::time::{Duration, Instant};

use joincert_core::certifier::{certify_drip, certify_h1_quadruple, certify_h1_triples, DripReport};
use joincert_core::interp::{cohomology, generic_rank_certificate};
use joincert_core::lab::{gradient_check, jacobian_rank, recover, FitConfig};
use joincert_core::schemes::{random_scheme, ComponentKind};
use joincert_core::tangent::{duality_check, join_dimension_sigma};
use joincert_core::{
    derive_seed, parameter_table, Error, PlantedInstance, PrimeField, TrialPolicy, Verdict, DEFAULT_PRIME,
    SECONDARY_PRIME,
};
use serde_json::{json, Value};

const SEED: u64 = 20_240_601;

struct Outcome {
    pass: bool,
    summary: String,
    /// Verdict data compared across reruns.
    record: Value,
}

fn within(elapsed: Duration, limit: Duration) -> bool {
    elapsed < limit
}

fn fmt_time(d: Duration) -> String {
    if d < Duration::from_millis(10) {
        format!("{} us", d.as_micros())
    } else {
        format!("{:.2} s", d.as_secs_f64())
    }
}

fn policy(prime: u64) -> TrialPolicy {
    TrialPolicy {
        trials: 5,
        ..TrialPolicy::with_seed(SEED)
    }
    .with_prime(prime)
}

fn c1_bounds() -> Outcome {
    let clock = Instant::now();
    let (a, b, c) = (parameter_table(2, 7), parameter_table(3, 7), parameter_table(5, 5));
    let elapsed = clock.elapsed();
    // C(9,2) = 36, C(8,2)/3 = 28/3, C(7,2)/3 = 21/3; C(10,3) = 120, C(8,3)/4 = 56/4; C(9,5)/6 = 126/6.
    let values = [a.n, a.alpha, a.beta, b.n, b.beta, c.alpha];
    let pass = values == [35, 9, 7, 119, 14, 21] && within(elapsed, Duration::from_millis(1));
    Outcome {
        pass,
        summary: format!("bounds table {values:?} in {}", fmt_time(elapsed)),
        record: json!(values),
    }
}

fn c2_triples() -> Outcome {
    let grid = [(2, 6), (2, 7), (3, 6), (3, 7), (5, 5), (5, 6)];
    let clock = Instant::now();
    let mut failures = Vec::new();
    let mut record = Vec::new();
    for (m, d) in grid {
        for prime in [DEFAULT_PRIME, SECONDARY_PRIME] {
            match certify_h1_triples(m, d, &policy(prime)) {
                Ok(certs) => {
                    for (i, c) in certs.iter().enumerate() {
                        if !c.is_certified() {
                            failures.push(format!("({m},{d}) i={} p={prime}", i + 1));
                        }
                    }
                    record.push(json!(certs));
                }
                Err(e) => failures.push(format!("({m},{d}): {e}")),
            }
        }
    }
    let elapsed = clock.elapsed();
    Outcome {
        pass: failures.is_empty() && within(elapsed, Duration::from_secs(10)),
        summary: format!(
            "h1 triples: 24 certificates over 6 cells x 2 primes, {} uncertified {failures:?}, {}",
            failures.len(),
            fmt_time(elapsed)
        ),
        record: Value::Array(record),
    }
}

fn c3_quadruple() -> Outcome {
    let grid = [(2, 7), (2, 8), (3, 7), (5, 6)];
    let clock = Instant::now();
    let mut failures = Vec::new();
    let mut record = Vec::new();
    for (m, d) in grid {
        match certify_h1_quadruple(m, d, &policy(DEFAULT_PRIME)) {
            Ok(c) => {
                if !c.is_certified() {
                    failures.push(format!("({m},{d})"));
                }
                record.push(json!(c));
            }
            Err(e) => failures.push(format!("({m},{d}): {e}")),
        }
    }
    let elapsed = clock.elapsed();
    Outcome {
        pass: failures.is_empty() && within(elapsed, Duration::from_secs(10)),
        summary: format!("h1 quadruple: 4 cells, uncertified {failures:?}, {}", fmt_time(elapsed)),
        record: Value::Array(record),
    }
}

fn drip_ok(r: &DripReport) -> bool {
    let Some(t) = r.params.t else { return false };
    let m = r.params.m;
    let o = r.o_multiplicity.as_ref();
    r.is_certified()
        && r.rank == t * (m + 1) - 1
        && r.node_checks.len() == t - 2
        && r.node_checks.iter().all(|n| n.hessian_rank == m)
        && o.is_some_and(|o| o.hessian_rank == m - 1 && o.third_order_value != 0)
}

fn c4_drip() -> Outcome {
    let mut cells: Vec<(usize, u32, usize)> = (3..=8).map(|t| (2, 7, t)).collect();
    cells.extend([3, 7, 14, 15].map(|t| (3, 7, t)));
    cells.extend([3, 11, 21, 22].map(|t| (5, 6, t)));
    let clock = Instant::now();
    let mut failures = Vec::new();
    let mut record = Vec::new();
    for &(m, d, t) in &cells {
        match certify_drip(m, d, t, &policy(DEFAULT_PRIME), false) {
            Ok(r) => {
                if !drip_ok(&r) {
                    failures.push(format!("({m},{d},{t})"));
                }
                record.push(json!(r));
            }
            Err(e) => failures.push(format!("({m},{d},{t}): {e}")),
        }
    }
    let elapsed = clock.elapsed();
    Outcome {
        pass: failures.is_empty() && within(elapsed, Duration::from_secs(60)),
        summary: format!(
            "drip grid: {} cells, rank t(m+1)-1, nodes of rank m, O of rank m-1 with nonzero cubic term; failing {failures:?}, {}",
            cells.len(),
            fmt_time(elapsed)
        ),
        record: Value::Array(record),
    }
}

fn c5_enumeration() -> Outcome {
    let mut failures = Vec::new();
    let mut record = Vec::new();
    for t in 3..=8 {
        for k in 0..3 {
            let seed = derive_seed(SEED, 100 + k);
            let p = TrialPolicy {
                trials: 5,
                ..TrialPolicy::with_seed(seed)
            };
            let ok = match certify_drip(2, 7, t, &p, false) {
                Ok(r) => {
                    let ok = r.sing_enumeration.as_ref().is_some_and(|s| {
                        s.matches && s.points.len() == t - 1 && s.points == s.expected
                    });
                    record.push(json!(r.sing_enumeration));
                    ok
                }
                Err(_) => false,
            };
            if !ok {
                failures.push(format!("t={t} seed#{k}"));
            }
        }
    }
    Outcome {
        pass: failures.is_empty(),
        summary: format!("plane singular loci equal {{P_1..P_(t-2), O}} for t=3..8 x 3 seeds; failing {failures:?}"),
        record: Value::Array(record),
    }
}

fn c6_duality() -> Outcome {
    let mut configs: Vec<(usize, u32, usize)> = (2..=8).map(|t| (2, 7, t)).collect();
    configs.extend([2, 3, 5, 7, 10, 14, 15].map(|t| (3, 7, t)));
    configs.extend([3, 7, 11, 16, 21, 22].map(|t| (5, 6, t)));
    assert_eq!(configs.len(), 20);
    let mut failures = Vec::new();
    let mut record = Vec::new();
    for (k, &(m, d, t)) in configs.iter().enumerate() {
        match duality_check(m, d, t, derive_seed(SEED, k as u64)) {
            Ok(o) => {
                if !o.holds() {
                    failures.push(format!("({m},{d},{t}) {o:?}"));
                }
                record.push(json!([m, d, t, o]));
            }
            Err(e) => failures.push(format!("({m},{d},{t}): {e}")),
        }
    }
    Outcome {
        pass: failures.is_empty(),
        summary: format!("primal/dual Terracini duality at 20 configurations; failing {failures:?}"),
        record: Value::Array(record),
    }
}

fn c7_clebsch() -> Outcome {
    let field = PrimeField::default_prime();
    let kinds = vec![ComponentKind::DOUBLE; 5];
    let h1 = random_scheme(&field, &kinds, 2, SEED)
        .and_then(|s| cohomology(&field, &s, 4))
        .map(|c| c.h1);
    let sigma = join_dimension_sigma(2, 4, 5, SEED);
    let cert = generic_rank_certificate(&kinds, 2, 4, &policy(DEFAULT_PRIME));
    let drip = certify_drip(2, 4, 5, &policy(DEFAULT_PRIME), false);
    let cert_verdict = cert.as_ref().map(|c| c.verdict);
    let pass = h1 == Ok(1)
        && sigma == Ok(13)
        && cert_verdict == Ok(Verdict::Inconclusive)
        && matches!(drip, Err(Error::Hypothesis(_)));
    Outcome {
        pass,
        summary: format!(
            "Clebsch control: h1 {h1:?}, sigma_5 dim {sigma:?} (< 14), rank certificate {cert_verdict:?}, drip {}",
            if drip.is_err() { "rejected" } else { "accepted" }
        ),
        record: json!({
            "h1": h1.ok(),
            "sigma": sigma.ok(),
            "certificate": cert.ok(),
            "drip_rejected": drip.is_err(),
        }),
    }
}

fn c8_identifiability() -> Outcome {
    let configs = [(2usize, 7u32, 3usize), (2, 7, 5), (3, 7, 4), (5, 6, 5)];
    let mut failures = Vec::new();
    let mut record = Vec::new();
    for (m, d, t) in configs {
        let mut ranks = Vec::new();
        for k in 0..20 {
            let rank = PlantedInstance::plant(m, d, t, derive_seed(SEED, k)).and_then(|i| jacobian_rank(&i));
            match rank {
                Ok(r) => {
                    if r != t * (m + 1) - 1 {
                        failures.push(format!("({m},{d},{t}) #{k}: rank {r}"));
                    }
                    ranks.push(r);
                }
                Err(e) => failures.push(format!("({m},{d},{t}) #{k}: {e}")),
            }
        }
        record.push(json!([m, d, t, ranks]));
    }
    Outcome {
        pass: failures.is_empty(),
        summary: format!("exact Jacobian rank t(m+1)-1 on 4 x 20 plants; failing {failures:?}"),
        record: Value::Array(record),
    }
}

fn c9_uniqueness() -> Outcome {
    let clock = Instant::now();
    let mut non_matches = 0;
    let mut all_rates_ok = true;
    let mut parts = Vec::new();
    let mut record = Vec::new();
    for (m, d, t) in [(2usize, 7u32, 3usize), (2, 7, 4)] {
        let mut rates = Vec::new();
        let mut converged = 0;
        for k in 0..20 {
            let seed = derive_seed(SEED, 1000 + k);
            let cfg = FitConfig {
                seed: derive_seed(seed, 1),
                ..FitConfig::default()
            };
            match PlantedInstance::plant(m, d, t, seed).and_then(|inst| recover(&inst, &cfg)) {
                Ok(r) => {
                    non_matches += r.converged_count - r.matched_count;
                    converged += r.converged_count;
                    rates.push(r.converged_count as f64 / r.restarts as f64);
                    record.push(json!([m, d, t, k, r.converged_count, r.matched_count, r.red_alert]));
                }
                Err(e) => {
                    non_matches += 1;
                    record.push(json!([m, d, t, k, e.to_string()]));
                }
            }
        }
        let mean = rates.iter().sum::<f64>() / rates.len().max(1) as f64;
        all_rates_ok &= mean >= 0.30;
        parts.push(format!("({m},{d},{t}) mean convergence {:.1}% ({converged} fits)", 100.0 * mean));
    }
    let elapsed = clock.elapsed();
    Outcome {
        pass: non_matches == 0 && all_rates_ok && within(elapsed, Duration::from_secs(300)),
        summary: format!(
            "uniqueness 2 x 20 plants x 50 restarts: {non_matches} converged non-matches; {}; need >= 30.0%; {}",
            parts.join(", "),
            fmt_time(elapsed)
        ),
        record: Value::Array(record),
    }
}

fn c10_gradient() -> Outcome {
    let grid = [(2usize, 7u32, 3usize), (2, 7, 4), (2, 7, 5), (3, 7, 4), (5, 6, 5)];
    let mut worst: f64 = 0.0;
    let mut failures = Vec::new();
    for (k, (m, d, t)) in grid.into_iter().enumerate() {
        match gradient_check(m, d, t, derive_seed(SEED, k as u64), 10) {
            Ok(err) => {
                worst = worst.max(err);
                if err.is_nan() || err >= 1e-6 {
                    failures.push(format!("({m},{d},{t}) {err:.2e}"));
                }
            }
            Err(e) => failures.push(format!("({m},{d},{t}): {e}")),
        }
    }
    Outcome {
        pass: failures.is_empty(),
        summary: format!("analytic vs central-difference Jacobian, 10 points x 5 configs, worst relative error {worst:.2e} (< 1e-6); failing {failures:?}"),
        record: Value::Null,
    }
}

type Criterion = fn() -> Outcome;

fn main() {
    let criteria: [(u32, Criterion); 10] = [
        (1, c1_bounds),
        (2, c2_triples),
        (3, c3_quadruple),
        (4, c4_drip),
        (5, c5_enumeration),
        (6, c6_duality),
        (7, c7_clebsch),
        (8, c8_identifiability),
        (9, c9_uniqueness),
        (10, c10_gradient),
    ];
    let mut failed = Vec::new();
    let mut first_records = Vec::new();
    let report = |id: u32, o: &Outcome| {
        println!("{} {id:>2}  {}", if o.pass { "PASS" } else { "FAIL" }, o.summary);
    };
    for (id, run) in criteria {
        let o = run();
        report(id, &o);
        if !o.pass {
            failed.push(id);
        }
        first_records.push((id, o.record));
    }

    // Rerun 2..=9 and compare the serialized verdict data.
    let clock = Instant::now();
    let mut differing = Vec::new();
    for (id, run) in criteria.iter().filter(|(id, _)| (2..=9).contains(id)) {
        let again = serde_json::to_string(&run().record).unwrap();
        let first = &first_records.iter().find(|(i, _)| i == id).unwrap().1;
        if serde_json::to_string(first).unwrap() != again {
            differing.push(*id);
        }
    }
    let o = Outcome {
        pass: differing.is_empty(),
        summary: format!(
            "rerun of criteria 2-9 gives identical verdict JSON; differing {differing:?}, {}",
            fmt_time(clock.elapsed())
        ),
        record: Value::Null,
    };
    report(11, &o);
    if !o.pass {
        failed.push(11);
    }

    if failed.is_empty() {
        println!("acceptance: all 11 criteria pass");
    } else {
        println!("acceptance: failing criteria {failed:?}");
        std::process::exit(1);
    }
}

//! Report envelope, per-job results, CSV projection and exit status.

use joincert_core::certifier::DripReport;
use joincert_core::lab::RecoveryResult;
use joincert_core::{Certificate, Params, Verdict};
use serde::{Deserialize, Serialize};

use crate::error::{is_usage_error, EXIT_USAGE};
use crate::jobs::{CommandKind, Job, Lemma};

/// Bumped whenever the report layout changes.
pub const SCHEMA_VERSION: u32 = 1;
pub const SCHEMA: &str = include_str!("../schema/report.schema.json");
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Certified,
    Matched,
    Inconclusive,
    OutOfRange,
    Failed,
    Error,
}

impl From<Verdict> for Status {
    fn from(v: Verdict) -> Self {
        match v {
            Verdict::Certified => Status::Certified,
            Verdict::Inconclusive => Status::Inconclusive,
            Verdict::OutOfRange => Status::OutOfRange,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimsReport {
    pub params: Params,
    pub prime: u64,
    pub seed: u64,
    pub tau_dim: usize,
    pub sigma_dim: usize,
    pub expected_tau: u64,
    pub expected_sigma: u64,
    /// Certified when both ranks reach the expected values; a smaller rank
    /// over F_p alone proves nothing.
    pub verdict: Status,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UniqueReport {
    pub params: Params,
    pub instance: usize,
    pub instance_seed: u64,
    pub forms: Vec<Vec<i64>>,
    pub jacobian_rank: usize,
    pub expected_jacobian_rank: usize,
    pub locally_identifiable: bool,
    /// Fraction of restarts whose residual fell below the tolerance.
    pub convergence_rate: f64,
    pub recovery: RecoveryResult,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub control: Option<RecoveryResult>,
    pub verdict: Status,
}

impl UniqueReport {
    pub fn judge(&self) -> Status {
        let control_converged = self.control.as_ref().is_some_and(|c| c.converged_count > 0);
        if !self.locally_identifiable || self.recovery.red_alert || control_converged {
            Status::Failed
        } else if self.recovery.matched {
            Status::Matched
        } else {
            Status::Inconclusive
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorClass {
    /// Malformed parameters or a violated hypothesis.
    Usage,
    Internal,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Outcome {
    Dims(DimsReport),
    Certificate(Certificate),
    Drip(DripReport),
    Unique(Box<UniqueReport>),
    Error { class: ErrorClass, message: String },
}

impl Outcome {
    pub fn from_error(e: &joincert_core::Error) -> Self {
        Outcome::Error {
            class: if is_usage_error(e) {
                ErrorClass::Usage
            } else {
                ErrorClass::Internal
            },
            message: e.to_string(),
        }
    }

    pub fn status(&self) -> Status {
        match self {
            Outcome::Dims(r) => r.verdict,
            Outcome::Certificate(c) => c.verdict.into(),
            Outcome::Drip(r) => r.verdict.into(),
            Outcome::Unique(r) => r.verdict,
            Outcome::Error { .. } => Status::Error,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JobResult {
    pub job: Job,
    pub result: Outcome,
}

/// Timing and host data, kept apart so the rest of a report is reproducible.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Meta {
    pub started_unix_ms: u64,
    pub finished_unix_ms: u64,
    pub wall_time_ms: u64,
    /// Wall time of each job, in result order.
    pub job_wall_time_ms: Vec<u64>,
    pub workers: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    pub schema_version: u32,
    pub tool_version: String,
    pub command: String,
    pub results: Vec<JobResult>,
    pub meta: Meta,
}

/// 64 for usage errors, 1 for a definite failure, 2 when anything is
/// inconclusive or out of range, 0 otherwise.
pub fn exit_code(results: &[JobResult]) -> i32 {
    let usage = results
        .iter()
        .any(|r| matches!(r.result, Outcome::Error { class: ErrorClass::Usage, .. }));
    if usage {
        return EXIT_USAGE;
    }
    let statuses: Vec<Status> = results.iter().map(|r| r.result.status()).collect();
    if statuses.iter().any(|s| matches!(s, Status::Failed | Status::Error)) {
        1
    } else if statuses.iter().any(|s| matches!(s, Status::Inconclusive | Status::OutOfRange)) {
        2
    } else {
        0
    }
}

#[derive(Debug, Serialize)]
struct CsvRow {
    job: usize,
    command: CommandKind,
    m: usize,
    d: u32,
    t: Option<usize>,
    variant: String,
    seed: u64,
    prime: u64,
    verdict: Status,
    value: Option<usize>,
    expected: Option<usize>,
    detail: String,
}

fn variant(job: &Job) -> String {
    match (job.lemma, job.i, &job.scheme, job.instance) {
        (Some(Lemma::Triples), Some(i), _, _) => format!("triples i={i}"),
        (Some(Lemma::Quadruple), ..) => "quadruple".into(),
        (Some(Lemma::Custom), _, Some(s), _) => s.clone(),
        (_, _, _, Some(k)) => format!("instance {k}"),
        _ => String::new(),
    }
}

/// One row per job.
pub fn to_csv(envelope: &Envelope) -> Result<String, csv::Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for (k, r) in envelope.results.iter().enumerate() {
        let (value, expected, detail) = match &r.result {
            Outcome::Dims(x) => (
                Some(x.tau_dim),
                Some(x.expected_tau as usize),
                format!("sigma {}/{}", x.sigma_dim, x.expected_sigma),
            ),
            Outcome::Certificate(c) => (Some(c.achieved_rank), Some(c.expected_rank), c.label.clone()),
            Outcome::Drip(x) => (Some(x.rank), Some(x.expected_rank), format!("{:?}", x.isolatedness)),
            Outcome::Unique(x) => (
                Some(x.jacobian_rank),
                Some(x.expected_jacobian_rank),
                format!(
                    "converged {}/{} matched {}",
                    x.recovery.converged_count, x.recovery.restarts, x.recovery.matched_count
                ),
            ),
            Outcome::Error { message, .. } => (None, None, message.clone()),
        };
        w.serialize(CsvRow {
            job: k,
            command: r.job.command,
            m: r.job.m,
            d: r.job.d,
            t: r.job.t,
            variant: variant(&r.job),
            seed: r.job.seed,
            prime: r.job.prime,
            verdict: r.result.status(),
            value,
            expected,
            detail,
        })?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

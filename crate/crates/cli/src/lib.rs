//! Command-line front end: job expansion, execution and reports.

pub mod args;
pub mod error;
pub mod jobs;
pub mod report;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use joincert_core::certifier::{certify_drip, certify_h1_custom, certify_h1_quadruple, certify_h1_triples_i, certify_weak_3o};
use joincert_core::lab::{adversarial_control, jacobian_rank, local_identifiability, recover, FitConfig};
use joincert_core::schemes::parse_scheme_spec;
use joincert_core::tangent::{join_dimension_sigma_over, join_dimension_tau_over};
use joincert_core::{derive_seed, Params, PlantedInstance, PrimeField, Result as CoreResult};
use rayon::prelude::*;

use args::{Cli, Command, Format};
use error::CliError;
use jobs::{expand, CommandKind, Job, JobEntry, JobFile, Lemma};
use report::{exit_code, DimsReport, Envelope, JobResult, Meta, Outcome, Status, UniqueReport};

/// Text to emit and the process exit status.
#[derive(Debug)]
pub struct Execution {
    pub output: String,
    pub out: Option<PathBuf>,
    pub exit_code: i32,
}

fn dims(job: &Job) -> CoreResult<Outcome> {
    let t = job.t.unwrap_or_default();
    let params = Params::new(job.m, job.d, Some(t))?;
    let field = PrimeField::new(job.prime)?;
    let tau_dim = join_dimension_tau_over(&field, job.m, job.d, t, job.seed)?;
    let sigma_dim = join_dimension_sigma_over(&field, job.m, job.d, t, job.seed)?;
    let table = params.table();
    let (expected_tau, expected_sigma) = (table.expected_dim_tau(t), table.expected_dim_sigma(t));
    let verdict = if tau_dim as u64 == expected_tau && sigma_dim as u64 == expected_sigma {
        Status::Certified
    } else {
        Status::Inconclusive
    };
    Ok(Outcome::Dims(DimsReport {
        params,
        prime: job.prime,
        seed: job.seed,
        tau_dim,
        sigma_dim,
        expected_tau,
        expected_sigma,
        verdict,
    }))
}

fn unique(job: &Job) -> CoreResult<Outcome> {
    let t = job.t.unwrap_or_default();
    let inst = PlantedInstance::plant(job.m, job.d, t, job.seed)?;
    let cfg = FitConfig {
        restarts: job.restarts.unwrap_or(FitConfig::default().restarts),
        seed: derive_seed(job.seed, 1),
        ..FitConfig::default()
    };
    let recovery = recover(&inst, &cfg)?;
    let control = if job.control {
        Some(adversarial_control(&inst, &cfg)?)
    } else {
        None
    };
    let mut report = UniqueReport {
        params: inst.params,
        instance: job.instance.unwrap_or_default(),
        instance_seed: job.seed,
        forms: inst.forms.clone(),
        jacobian_rank: jacobian_rank(&inst)?,
        expected_jacobian_rank: t * (job.m + 1) - 1,
        locally_identifiable: local_identifiability(&inst)?,
        convergence_rate: recovery.converged_count as f64 / recovery.restarts as f64,
        recovery,
        control,
        verdict: Status::Inconclusive,
    };
    report.verdict = report.judge();
    Ok(Outcome::Unique(Box::new(report)))
}

pub fn run_job(job: &Job) -> Outcome {
    let policy = job.policy();
    let t = job.t.unwrap_or_default();
    let res = match job.command {
        CommandKind::Dims => dims(job),
        CommandKind::H1 => match job.lemma {
            Some(Lemma::Triples) => certify_h1_triples_i(job.m, job.d, job.i.unwrap_or(1), &policy).map(Outcome::Certificate),
            Some(Lemma::Quadruple) => certify_h1_quadruple(job.m, job.d, &policy).map(Outcome::Certificate),
            _ => parse_scheme_spec(job.scheme.as_deref().unwrap_or_default())
                .and_then(|kinds| certify_h1_custom(&kinds, job.m, job.d, &policy))
                .map(Outcome::Certificate),
        },
        CommandKind::Weak3o => certify_weak_3o(job.m, job.d, t, &policy).map(Outcome::Certificate),
        CommandKind::Certify => certify_drip(job.m, job.d, t, &policy, job.allow_out_of_range).map(Outcome::Drip),
        CommandKind::Unique => unique(job),
    };
    res.unwrap_or_else(|e| Outcome::from_error(&e))
}

fn unix_ms() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis() as u64)
        .unwrap_or(0)
}

/// Runs jobs on the worker pool; results keep job order.
pub fn run_jobs(command: &str, jobs: Vec<Job>) -> Envelope {
    let started_unix_ms = unix_ms();
    let clock = Instant::now();
    let timed: Vec<(JobResult, u64)> = jobs
        .into_par_iter()
        .map(|job| {
            let t0 = Instant::now();
            let result = run_job(&job);
            (JobResult { job, result }, t0.elapsed().as_millis() as u64)
        })
        .collect();
    let (results, job_wall_time_ms) = timed.into_iter().unzip();
    Envelope {
        schema_version: report::SCHEMA_VERSION,
        tool_version: report::TOOL_VERSION.to_string(),
        command: command.to_string(),
        results,
        meta: Meta {
            started_unix_ms,
            finished_unix_ms: unix_ms(),
            wall_time_ms: clock.elapsed().as_millis() as u64,
            job_wall_time_ms,
            workers: rayon::current_num_threads(),
        },
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Dims { .. } => "dims",
        Command::H1 { .. } => "h1",
        Command::Weak3o { .. } => "weak3o",
        Command::Certify { .. } => "certify",
        Command::Unique { .. } => "unique",
        Command::Schema => "schema",
        Command::Run { .. } => "run",
    }
}

fn read_job_file(path: &Path) -> Result<Vec<JobEntry>, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path.display(), e))?;
    let file: JobFile = serde_json::from_str(&text).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
    Ok(file.entries())
}

pub fn render(envelope: &Envelope, format: Format) -> Result<String, CliError> {
    Ok(match format {
        Format::Json => serde_json::to_string_pretty(envelope)? + "\n",
        Format::Csv => report::to_csv(envelope)?,
    })
}

pub fn execute(cli: &Cli) -> Result<Execution, CliError> {
    if let Some(workers) = cli.common.workers {
        if workers == 0 {
            return Err(CliError::usage("workers must be >= 1"));
        }
        // Fails only if a pool already exists, which is harmless.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(workers).build_global();
    }
    if let Some(p) = cli.common.prime {
        PrimeField::new(p)?;
    }
    let (entries, mut out, mut format) = match &cli.command {
        Command::Schema => {
            return Ok(Execution {
                output: report::SCHEMA.to_string(),
                out: cli.common.out.clone(),
                exit_code: 0,
            })
        }
        Command::Run { job } => {
            let entries = read_job_file(job)?;
            let out = entries.iter().find_map(|e| e.out.clone());
            let format = entries.iter().find_map(|e| e.format).map(Format::from);
            (entries, out, format)
        }
        c => (vec![c.entry().expect("direct subcommand")], None, None),
    };
    if cli.common.out.is_some() {
        out = cli.common.out.clone();
    }
    if format.is_none() || cli.common.format != Format::Json {
        format = Some(cli.common.format);
    }
    let mut jobs = Vec::new();
    for e in &entries {
        jobs.extend(expand(e, &cli.common)?);
    }
    let envelope = run_jobs(command_name(&cli.command), jobs);
    Ok(Execution {
        output: render(&envelope, format.unwrap_or(Format::Json))?,
        out,
        exit_code: exit_code(&envelope.results),
    })
}

/// Writes through a temporary file in the same directory, then renames.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().ok_or_else(|| CliError::usage(format!("bad output path {}", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    let write = || -> std::io::Result<()> {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents.as_bytes())?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    };
    write().map_err(|e| {
        let _ = fs::remove_file(&tmp);
        CliError::io(path.display(), e)
    })
}

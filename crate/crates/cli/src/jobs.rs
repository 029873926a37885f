//! Job entries as written in job files, and their expansion into concrete
//! jobs with explicit seeds.

use std::path::PathBuf;

use clap::ValueEnum;
use joincert_core::{derive_seed, TrialPolicy};
use serde::{Deserialize, Serialize};

use crate::args::{Common, Format};
use crate::error::CliError;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CommandKind {
    #[default]
    Dims,
    H1,
    Weak3o,
    Certify,
    Unique,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Lemma {
    /// i triple points and alpha - i double points, i = 1, 2.
    Triples,
    /// One quadruple point and beta - 1 double points.
    Quadruple,
    /// Components given by `scheme`.
    Custom,
}

/// A parameter value in a job file: `7`, `[3, 5, 9]` or `"3..5"`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Range {
    One(u64),
    List(Vec<u64>),
    Text(String),
}

impl Range {
    pub fn values(&self) -> Result<Vec<u64>, CliError> {
        match self {
            Range::One(v) => Ok(vec![*v]),
            Range::List(v) if !v.is_empty() => Ok(v.clone()),
            Range::List(_) => Err(CliError::usage("empty parameter list")),
            Range::Text(s) => parse_range(s),
        }
    }
}

/// `"7"`, `"3..5"` (inclusive) or `"3,5,9"`.
pub fn parse_range(s: &str) -> Result<Vec<u64>, CliError> {
    let num = |x: &str| {
        x.trim()
            .parse::<u64>()
            .map_err(|_| CliError::usage(format!("bad number {x:?} in range {s:?}")))
    };
    if let Some((a, b)) = s.split_once("..") {
        let b = b.strip_prefix('=').unwrap_or(b);
        let (a, b) = (num(a)?, num(b)?);
        if a > b {
            return Err(CliError::usage(format!("empty range {s:?}")));
        }
        return Ok((a..=b).collect());
    }
    s.split(',').map(num).collect()
}

/// One entry of a job file. Missing trials, seed and prime fall back to the
/// command line.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobEntry {
    pub command: CommandKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<Range>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<Range>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<Range>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lemma: Option<Lemma>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scheme: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prime: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub instances: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub restarts: Option<usize>,
    #[serde(default)]
    pub control: bool,
    #[serde(default)]
    pub allow_out_of_range: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<FormatName>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FormatName {
    Json,
    Csv,
}

impl From<FormatName> for Format {
    fn from(f: FormatName) -> Self {
        match f {
            FormatName::Json => Format::Json,
            FormatName::Csv => Format::Csv,
        }
    }
}

/// A job file holds one entry or a list of them.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum JobFile {
    One(Box<JobEntry>),
    Many(Vec<JobEntry>),
}

impl JobFile {
    pub fn entries(self) -> Vec<JobEntry> {
        match self {
            JobFile::One(e) => vec![*e],
            JobFile::Many(v) => v,
        }
    }
}

/// A fully specified unit of work.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Job {
    pub command: CommandKind,
    pub m: usize,
    pub d: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lemma: Option<Lemma>,
    /// Number of triple points for the triples lemma.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub i: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scheme: Option<String>,
    /// Index of the planted instance for uniqueness jobs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub instance: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub restarts: Option<usize>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub control: bool,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub allow_out_of_range: bool,
    pub trials: usize,
    pub seed: u64,
    pub prime: u64,
}

impl Job {
    pub fn policy(&self) -> TrialPolicy {
        TrialPolicy {
            trials: self.trials,
            seed: self.seed,
            ..TrialPolicy::default()
        }
        .with_prime(self.prime)
    }
}

fn grid_axes(grid: &str) -> Result<[Option<Range>; 3], CliError> {
    let mut axes: [Option<Range>; 3] = [None, None, None];
    for item in grid.split_whitespace() {
        let (key, value) = item
            .split_once('=')
            .ok_or_else(|| CliError::usage(format!("grid item {item:?} is not key=range")))?;
        let slot = match key {
            "m" => 0,
            "d" => 1,
            "t" => 2,
            _ => return Err(CliError::usage(format!("unknown grid key {key:?}"))),
        };
        if axes[slot].is_some() {
            return Err(CliError::usage(format!("grid key {key:?} given twice")));
        }
        axes[slot] = Some(Range::Text(value.to_string()));
    }
    Ok(axes)
}

fn required(name: &str, r: &Option<Range>) -> Result<Vec<u64>, CliError> {
    r.as_ref()
        .ok_or_else(|| CliError::usage(format!("missing parameter {name}")))?
        .values()
}

fn to_u32(v: u64) -> Result<u32, CliError> {
    u32::try_from(v).map_err(|_| CliError::usage(format!("degree {v} too large")))
}

/// Expands ranges and lemma variants in grid order (m, then d, then t).
pub fn expand(entry: &JobEntry, common: &Common) -> Result<Vec<Job>, CliError> {
    let (m, d, t) = match &entry.grid {
        Some(grid) => {
            if entry.m.is_some() || entry.d.is_some() || entry.t.is_some() {
                return Err(CliError::usage("grid and explicit m, d, t are exclusive"));
            }
            let [m, d, t] = grid_axes(grid)?;
            (m, d, t)
        }
        None => (entry.m.clone(), entry.d.clone(), entry.t.clone()),
    };
    let ms = required("m", &m)?;
    let ds = required("d", &d)?;
    let needs_t = !matches!(entry.command, CommandKind::H1);
    let ts: Vec<Option<u64>> = if needs_t {
        required("t", &t)?.into_iter().map(Some).collect()
    } else if t.is_some() {
        return Err(CliError::usage("h1 takes no t"));
    } else {
        vec![None]
    };
    let trials = entry.trials.unwrap_or(common.trials);
    let seed = entry.seed.unwrap_or(common.seed);
    let prime = entry
        .prime
        .or(common.prime)
        .unwrap_or(TrialPolicy::default().prime);
    if entry.command == CommandKind::H1 {
        match entry.lemma {
            None => return Err(CliError::usage("h1 needs a lemma")),
            Some(Lemma::Custom) if entry.scheme.is_none() => {
                return Err(CliError::usage("the custom lemma needs a scheme"))
            }
            _ => {}
        }
    }

    let mut jobs = Vec::new();
    for &m in &ms {
        for &d in &ds {
            for &t in &ts {
                let base = Job {
                    command: entry.command,
                    m: m as usize,
                    d: to_u32(d)?,
                    t: t.map(|t| t as usize),
                    lemma: entry.lemma.filter(|_| entry.command == CommandKind::H1),
                    i: None,
                    scheme: entry.scheme.clone().filter(|_| entry.lemma == Some(Lemma::Custom)),
                    instance: None,
                    restarts: None,
                    control: false,
                    allow_out_of_range: entry.allow_out_of_range && entry.command == CommandKind::Certify,
                    trials,
                    seed,
                    prime,
                };
                match entry.command {
                    CommandKind::H1 if entry.lemma == Some(Lemma::Triples) => {
                        jobs.extend((1..=2).map(|i| Job { i: Some(i), ..base.clone() }));
                    }
                    CommandKind::Unique => {
                        let n = entry.instances.unwrap_or(20);
                        let restarts = entry.restarts.unwrap_or(50);
                        jobs.extend((0..n).map(|k| Job {
                            instance: Some(k),
                            restarts: Some(restarts),
                            control: entry.control,
                            seed: derive_seed(seed, k as u64),
                            ..base.clone()
                        }));
                    }
                    _ => jobs.push(base),
                }
            }
        }
    }
    Ok(jobs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn common() -> Common {
        Common {
            trials: 5,
            seed: 7,
            prime: None,
            workers: None,
            out: None,
            format: Format::Json,
        }
    }

    #[test]
    fn ranges() {
        assert_eq!(parse_range("3..5").unwrap(), vec![3, 4, 5]);
        assert_eq!(parse_range("3..=4").unwrap(), vec![3, 4]);
        assert_eq!(parse_range("3,7,14").unwrap(), vec![3, 7, 14]);
        assert!(parse_range("5..3").is_err());
        assert!(parse_range("x").is_err());
    }

    #[test]
    fn grid_expands_in_order_with_seeds() {
        let e = JobEntry {
            command: CommandKind::Certify,
            grid: Some("m=2..3 d=7 t=3..5".into()),
            ..JobEntry::default()
        };
        let jobs = expand(&e, &common()).unwrap();
        let cells: Vec<_> = jobs.iter().map(|j| (j.m, j.d, j.t.unwrap())).collect();
        assert_eq!(
            cells,
            vec![(2, 7, 3), (2, 7, 4), (2, 7, 5), (3, 7, 3), (3, 7, 4), (3, 7, 5)]
        );
        assert!(jobs.iter().all(|j| j.seed == 7 && j.trials == 5));
    }

    #[test]
    fn variants_and_errors() {
        let e = JobEntry {
            command: CommandKind::H1,
            m: Some(Range::One(2)),
            d: Some(Range::One(7)),
            lemma: Some(Lemma::Triples),
            ..JobEntry::default()
        };
        let jobs = expand(&e, &common()).unwrap();
        assert_eq!(jobs.iter().map(|j| j.i).collect::<Vec<_>>(), vec![Some(1), Some(2)]);

        let u = JobEntry {
            command: CommandKind::Unique,
            m: Some(Range::One(2)),
            d: Some(Range::One(7)),
            t: Some(Range::List(vec![3])),
            instances: Some(3),
            ..JobEntry::default()
        };
        let jobs = expand(&u, &common()).unwrap();
        assert_eq!(jobs.len(), 3);
        assert_ne!(jobs[0].seed, jobs[1].seed);

        let bad = JobEntry {
            command: CommandKind::Dims,
            m: Some(Range::One(2)),
            ..JobEntry::default()
        };
        assert!(expand(&bad, &common()).is_err());
        let bad = JobEntry {
            command: CommandKind::H1,
            m: Some(Range::One(2)),
            d: Some(Range::One(7)),
            ..JobEntry::default()
        };
        assert!(expand(&bad, &common()).is_err());
    }

    #[test]
    fn job_file_forms() {
        let one: JobFile = serde_json::from_str(r#"{"command":"dims","m":2,"d":7,"t":"3..4"}"#).unwrap();
        assert_eq!(one.entries().len(), 1);
        let many: JobFile =
            serde_json::from_str(r#"[{"command":"dims","m":2,"d":7,"t":3},{"command":"h1","m":[2,3],"d":7,"lemma":"quadruple"}]"#)
                .unwrap();
        let entries = many.entries();
        assert_eq!(expand(&entries[1], &common()).unwrap().len(), 2);
        assert!(serde_json::from_str::<JobFile>(r#"{"command":"dims","bogus":1}"#).is_err());
    }
}

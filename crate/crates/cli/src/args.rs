use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::jobs::{CommandKind, JobEntry, Lemma, Range};

#[derive(Parser, Debug)]
#[command(
    name = "joincert",
    version,
    about = "Certification runs for tangential joins of Veronese varieties"
)]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Random trials per certificate.
    #[arg(long, global = true, default_value_t = 5)]
    pub trials: usize,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Main prime; the other built-in prime is the fallback.
    #[arg(long, global = true, env = "JOINCERT_PRIME")]
    pub prime: Option<u64>,
    /// Worker threads for grids and restarts.
    #[arg(long, global = true, env = "JOINCERT_WORKERS")]
    pub workers: Option<usize>,
    /// Report path; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Terracini dimensions of tau(X, t) and sigma_t(X).
    Dims {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        d: u32,
        #[arg(long)]
        t: usize,
    },
    /// h^1 vanishing certificates.
    H1 {
        #[arg(long, value_enum)]
        lemma: Lemma,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        d: u32,
        /// Components for `--lemma custom`, e.g. "Z23,2P*6".
        #[arg(long)]
        scheme: Option<String>,
    },
    /// The 3O plus double points system.
    Weak3o {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        d: u32,
        #[arg(long)]
        t: usize,
    },
    /// Drip reports for one cell or a grid such as "m=2..3 d=7 t=3..5".
    Certify {
        #[arg(long, num_args = 1.., conflicts_with_all = ["m", "d", "t"])]
        grid: Vec<String>,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        d: Option<u32>,
        #[arg(long)]
        t: Option<usize>,
        /// Run cells beyond beta + 1; their verdict is out_of_range.
        #[arg(long)]
        allow_out_of_range: bool,
    },
    /// Planted decompositions: identifiability and recovery.
    Unique {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        d: u32,
        #[arg(long)]
        t: usize,
        #[arg(long, default_value_t = 20)]
        instances: usize,
        #[arg(long, default_value_t = 50)]
        restarts: usize,
        /// Also fit with t - 1 summands.
        #[arg(long)]
        control: bool,
    },
    /// Print the report JSON schema.
    Schema,
    /// Run a JSON job file.
    Run {
        #[arg(long)]
        job: PathBuf,
    },
}

fn one(v: usize) -> Option<Range> {
    Some(Range::One(v as u64))
}

impl Command {
    /// The job entry a direct subcommand stands for.
    pub fn entry(&self) -> Option<JobEntry> {
        let base = |command| JobEntry {
            command,
            ..JobEntry::default()
        };
        Some(match *self {
            Command::Dims { m, d, t } => JobEntry {
                m: one(m),
                d: one(d as usize),
                t: one(t),
                ..base(CommandKind::Dims)
            },
            Command::H1 {
                lemma,
                m,
                d,
                ref scheme,
            } => JobEntry {
                m: one(m),
                d: one(d as usize),
                lemma: Some(lemma),
                scheme: scheme.clone(),
                ..base(CommandKind::H1)
            },
            Command::Weak3o { m, d, t } => JobEntry {
                m: one(m),
                d: one(d as usize),
                t: one(t),
                ..base(CommandKind::Weak3o)
            },
            Command::Certify {
                ref grid,
                m,
                d,
                t,
                allow_out_of_range,
            } => JobEntry {
                grid: (!grid.is_empty()).then(|| grid.join(" ")),
                m: m.and_then(one),
                d: d.and_then(|d| one(d as usize)),
                t: t.and_then(one),
                allow_out_of_range,
                ..base(CommandKind::Certify)
            },
            Command::Unique {
                m,
                d,
                t,
                instances,
                restarts,
                control,
            } => JobEntry {
                m: one(m),
                d: one(d as usize),
                t: one(t),
                instances: Some(instances),
                restarts: Some(restarts),
                control,
                ..base(CommandKind::Unique)
            },
            Command::Schema | Command::Run { .. } => return None,
        })
    }
}

use thiserror::Error;

/// Exit status for malformed invocations and violated hypotheses.
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] joincert_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn io(path: impl std::fmt::Display, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_string(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Json(_) => EXIT_USAGE,
            CliError::Core(e) if is_usage_error(e) => EXIT_USAGE,
            _ => 1,
        }
    }
}

/// Errors caused by the requested parameters rather than by the run.
pub fn is_usage_error(e: &joincert_core::Error) -> bool {
    use joincert_core::Error::*;
    matches!(e, Hypothesis(_) | InvalidParams(_) | InvalidPrime(_))
}

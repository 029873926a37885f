use thiserror::Error;

use crate::field::Domain;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not an odd prime below 2^63")]
    InvalidPrime(u64),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// A lemma or theorem hypothesis does not hold for the requested
    /// parameters. The message names the violated bound.
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("domain mismatch: scheme lives over {scheme}, requested {requested}")]
    DomainMismatch { scheme: Domain, requested: Domain },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("could not draw pairwise distinct points after {0} attempts")]
    Distinctness(usize),

    /// The condition matrix has full column rank, so |I_Z(d)| is empty.
    #[error("empty linear system: rank equals the number of monomials ({0})")]
    EmptySystem(usize),

    #[error("singular-locus enumeration failed: {0}")]
    Enumeration(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

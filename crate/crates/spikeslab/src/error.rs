use thiserror::Error;

/// Errors produced by the spikeslab library.
#[derive(Debug, Error)]
pub enum Error {
    /// Two objects that must share a dimension do not.
    #[error("dimension mismatch in {context}: expected {expected}, got {actual}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        actual: usize,
    },

    /// An argument violates a documented precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A model-space scan was requested beyond the configured capacity.
    #[error("model space too large: p = {p} exceeds limit {limit}")]
    Capacity { p: usize, limit: usize },

    /// A matrix factorization failed or a provably-signed quantity came out
    /// with the wrong sign by more than roundoff. Signals corrupt input.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// Every model was assigned zero prior mass.
    #[error("degenerate prior: all model scores are -inf")]
    DegeneratePrior,

    /// Odds between two models that both have zero posterior mass.
    #[error("undefined odds: both log scores are -inf")]
    UndefinedOdds,

    /// An operation that needs at least one element received none.
    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    /// A configuration file or value could not be interpreted.
    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

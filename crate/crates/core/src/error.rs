use thiserror::Error;

/// Errors raised by the restoration library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// A block was numerically dependent on the existing global QR factor.
    /// The factorization is left untouched.
    #[error("rank deficiency: orthogonal remainder {remainder:e} below tolerance {tolerance:e}")]
    RankDeficient { remainder: f64, tolerance: f64 },

    #[error("singular triangular factor: diagonal entry {index} is {value:e}")]
    Singular { index: usize, value: f64 },

    /// `trace` holds the records completed before the failure.
    #[error("non-finite iterate at iteration {iteration}")]
    NumericFailure {
        iteration: usize,
        trace: Box<crate::admm::ConvergenceTrace>,
    },

    #[error("malformed image: {0}")]
    Format(String),

    #[error("bad configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn dim_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Dimension(msg.into()))
}

pub(crate) fn param_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Parameter(msg.into()))
}

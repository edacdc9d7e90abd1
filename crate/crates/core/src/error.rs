use thiserror::Error;

/// Errors raised by the exact formulas, samplers and the experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("index out of range: {0}")]
    OutOfRange(String),

    #[error(
        "insufficient precision: deviation {deviation:e} at {bits} bits, retry with more precision bits"
    )]
    InsufficientPrecision { bits: u32, deviation: f64 },

    #[error("quadrature did not converge: estimate {estimate}, error estimate {error_estimate:e}")]
    QuadratureNonConvergence { estimate: f64, error_estimate: f64 },

    #[error("invalid moment query: {0}")]
    InvalidQuery(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum FraxError {
    /// A parameter lies outside the open window an operation is defined on.
    #[error("parameter out of domain: {0}")]
    Domain(String),

    /// A weighted moment integral diverges for the requested exponent.
    #[error("divergent moment: {0}")]
    DivergentMoment(String),

    /// A negative-order Fourier multiplier was applied to data with a nonzero mean.
    #[error("singular symbol: {0}")]
    SingularSymbol(String),

    /// Input was expected to have unit L2 norm.
    #[error("normalization: {0}")]
    Normalization(String),

    /// Grid or field shapes are inconsistent.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// A quadrature did not reach its convergence target.
    #[error("quadrature did not converge: {0}")]
    NonConvergence(String),

    /// Malformed input file or payload.
    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for FraxError {
    fn from(e: std::io::Error) -> Self {
        FraxError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, FraxError>;

pub(crate) fn domain(msg: impl Into<String>) -> FraxError {
    FraxError::Domain(msg.into())
}

use thiserror::Error;

/// Errors raised by the library. Quadrature non-convergence is normally a soft
/// flag on [`QuadratureEstimate`](crate::quadrature::QuadratureEstimate); it only
/// becomes [`Error::NoConvergence`] when a caller needs a single trusted value.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("integrand returned a non-finite value at u = {at}")]
    NonFiniteSample { at: f64 },

    #[error("quadrature did not converge (best estimate {estimate}, error estimate {error_estimate})")]
    NoConvergence { estimate: f64, error_estimate: f64 },

    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParams(msg.into())
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

use thiserror::Error;

/// Errors raised by the sampling, numerical and coverage routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("argument outside the domain of {function}: {value}")]
    Domain { function: &'static str, value: f64 },

    /// A numerical routine stopped before reaching the requested tolerance.
    /// The best estimate and its error bound are kept so callers can decide.
    #[error("{routine} did not converge: estimate {estimate}, error bound {error_bound:e}")]
    Accuracy {
        routine: &'static str,
        estimate: f64,
        error_bound: f64,
    },

    #[error("jet division by a series with zero constant term")]
    Singularity,

    #[error("realization contains no UAV")]
    NoUav,

    #[error("shape mismatch: expected {expected} entries, got {actual}")]
    Shape { expected: usize, actual: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}

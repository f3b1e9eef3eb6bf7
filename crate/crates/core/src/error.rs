use alloc::string::String;

/// Errors raised by the optimization core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A configuration component violates its parameter bounds.
    #[error("parameter `{name}`: {reason}")]
    Parameter { name: String, reason: String },
    /// Malformed input: mismatched lengths, out-of-range knobs, empty sets.
    #[error("validation: {0}")]
    Validation(String),
    /// A matrix factorization failed even after jitter escalation.
    #[error("numeric: {0}")]
    Numeric(String),
    /// Rejection sampling could not place a draw inside the unit cube.
    #[error("degenerate prior: {0}")]
    DegeneratePrior(String),
}

pub type Result<T, E = Error> = core::result::Result<T, E>;

pub(crate) fn validation(msg: impl Into<String>) -> Error {
    Error::Validation(msg.into())
}

pub(crate) fn numeric(msg: impl Into<String>) -> Error {
    Error::Numeric(msg.into())
}

use thiserror::Error;

/// Error type shared by all modules.
#[derive(Debug, Error)]
pub enum QcwError {
    /// A caller-supplied parameter violates a precondition.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// An iterative routine failed to converge or produced a non-finite value.
    #[error("numeric failure: {0}")]
    Numeric(String),

    /// Problem size exceeds a hard capacity limit.
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    /// Operation is not defined for the given model (e.g. non-quadratic P).
    #[error("unsupported operation: {0}")]
    Unsupported(String),

    /// An internal invariant that should hold by construction was violated.
    #[error("invariant violation: {0}")]
    InvariantViolation(String),
}

impl QcwError {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        QcwError::InvalidParameter(msg.into())
    }
}

//! Error types shared across the crate.

/// Errors produced by construction, verification and simulation routines.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A caller-supplied parameter violates a precondition.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A numerically checked property failed to hold.
    #[error("property violation: {0}")]
    PropertyViolation(String),

    /// A labelling map does not form a valid per-state assignment.
    #[error("invalid labelling: {0}")]
    InvalidLabelling(String),

    /// An exhaustive search would exceed its combinatorial budget.
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),

    /// A serialized artifact does not match its declared schema.
    #[error("schema error: {0}")]
    Schema(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

pub(crate) fn violation(msg: impl Into<String>) -> Error {
    Error::PropertyViolation(msg.into())
}

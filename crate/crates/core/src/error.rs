use thiserror::Error;

/// Errors raised by the library. Validation errors carry the name of the
/// violated invariant or missing field so that front ends can report it.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid monodromy: {reason}")]
    InvalidMonodromy {
        reason: String,
        /// Offending characteristic polynomial factor, when there is one.
        factor: Option<String>,
    },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("insufficient precision: {0}")]
    InsufficientPrecision(String),

    #[error("invalid {field}: {message}")]
    Validation { field: String, message: String },

    #[error("missing input: {0}")]
    Missing(String),

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("inconsistent {what}: {left} != {right}")]
    Inconsistency {
        what: String,
        left: String,
        right: String,
    },

    #[error("numerical failure: {0}")]
    Numeric(String),
}

impl Error {
    pub(crate) fn validation(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation {
            field: field.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

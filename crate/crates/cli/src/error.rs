use std::fmt;

use serde::Serialize;

/// Process exit codes. These are part of the interface and do not change.
pub mod exit {
    pub const OK: i32 = 0;
    pub const IO: i32 = 1;
    pub const VALIDATION: i32 = 2;
    pub const INCONSISTENCY: i32 = 3;
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CliError {
    Io(String),
    Usage(String),
    /// Input does not satisfy the schema or a type invariant.
    Validation { field: String, message: String },
    /// Two formulas that should agree do not, or the input contradicts itself.
    Inconsistency { what: String, left: String, right: String },
}

impl CliError {
    pub fn validation(field: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Validation {
            field: field.into(),
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) | CliError::Usage(_) => exit::IO,
            CliError::Validation { .. } => exit::VALIDATION,
            CliError::Inconsistency { .. } => exit::INCONSISTENCY,
        }
    }

    /// Prefixes the field path, for errors raised on a nested part of the input.
    pub fn within(self, prefix: &str) -> Self {
        match self {
            CliError::Validation { field, message } => CliError::Validation {
                field: join_path(prefix, &field),
                message,
            },
            other => other,
        }
    }

    pub fn payload(&self) -> ErrorPayload {
        let (kind, field, message) = match self {
            CliError::Io(m) => ("io", None, m.clone()),
            CliError::Usage(m) => ("usage", None, m.clone()),
            CliError::Validation { field, message } => ("validation", Some(field.clone()), message.clone()),
            CliError::Inconsistency { what, left, right } => {
                ("inconsistency", None, format!("{what}: {left} != {right}"))
            }
        };
        ErrorPayload {
            error: kind,
            exit_code: self.exit_code(),
            field,
            message,
        }
    }
}

fn join_path(prefix: &str, field: &str) -> String {
    if prefix.is_empty() {
        field.to_string()
    } else if field.is_empty() || field == "." {
        prefix.to_string()
    } else if field.starts_with('[') {
        format!("{prefix}{field}")
    } else {
        format!("{prefix}.{field}")
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Io(m) => write!(f, "i/o error: {m}"),
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Validation { field, message } => write!(f, "invalid {field}: {message}"),
            CliError::Inconsistency { what, left, right } => write!(f, "inconsistent {what}: {left} != {right}"),
        }
    }
}

impl std::error::Error for CliError {}

/// What goes to stderr when a command fails.
#[derive(Debug, Serialize)]
pub struct ErrorPayload {
    pub error: &'static str,
    pub exit_code: i32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub field: Option<String>,
    pub message: String,
}

impl From<bcov_core::Error> for CliError {
    fn from(e: bcov_core::Error) -> Self {
        use bcov_core::Error as E;
        match e {
            E::Validation { field, message } => CliError::Validation { field, message },
            E::Inconsistency { what, left, right } => CliError::Inconsistency { what, left, right },
            E::InvalidMonodromy {
                reason,
                factor: Some(factor),
            } if !reason.contains(&factor) => CliError::validation("matrix", format!("{reason}; offending factor {factor}")),
            E::InvalidMonodromy { reason, .. } => CliError::validation("matrix", reason),
            E::Missing(what) => CliError::validation(what, "missing"),
            E::Dimension(m) => CliError::validation("dimension", m),
            E::Precondition(m) => CliError::validation("precondition", m),
            E::InsufficientPrecision(m) => CliError::validation("truncation", m),
            E::NotApplicable(m) => CliError::validation("applicability", m),
            E::Numeric(m) => CliError::validation("samples", m),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

//! CLI error type and its exit-code mapping.

use thiserror::Error;

use hetnet_core::Error as CoreError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid scenario: {0}")]
    Validation(String),

    /// Numerical failure of a library call; the message names the
    /// operation and, where known, the tier.
    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Numeric(_) => 2,
            _ => 1,
        }
    }

    /// Classifies a library error raised while evaluating `context`.
    pub fn from_core(context: &str, e: CoreError) -> Self {
        match e {
            CoreError::NonConvergence { .. } | CoreError::Instability { .. } => {
                CliError::Numeric(format!("{context}: {e}"))
            }
            CoreError::Domain { .. } | CoreError::Invalid(_) => {
                CliError::Validation(format!("{context}: {e}"))
            }
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

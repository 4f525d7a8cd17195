//! Error split matching the process exit codes: configuration problems
//! (bad flags, malformed files) exit with 2, numeric/domain failures with 3.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("domain error: {0}")]
    Domain(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Domain(_) => 3,
        }
    }

    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    pub fn domain(msg: impl Into<String>) -> Self {
        CliError::Domain(msg.into())
    }
}

impl From<ustat_core::Error> for CliError {
    fn from(e: ustat_core::Error) -> Self {
        match e {
            ustat_core::Error::Parse { .. } | ustat_core::Error::Io { .. } => {
                CliError::Config(e.to_string())
            }
            other => CliError::Domain(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Config(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

use std::io;

use thiserror::Error;

/// Harness errors, each mapped to a process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    /// The selector found no admissible hyperparameters, or there is no
    /// excitation to tune against.
    #[error("{0}")]
    Infeasible(tvgain_core::Error),
    #[error("verification failed: {0}")]
    Violations(String),
    #[error(transparent)]
    Core(tvgain_core::Error),
    #[error("i/o error on {path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("malformed {what}: {detail}")]
    Parse { what: &'static str, detail: String },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Infeasible(_) => 2,
            CliError::Violations(_) => 3,
            CliError::Config(_) | CliError::Parse { .. } => 4,
            CliError::Core(_) | CliError::Io { .. } => 1,
        }
    }

    pub fn io(path: &std::path::Path, source: io::Error) -> Self {
        CliError::Io { path: path.display().to_string(), source }
    }
}

impl From<tvgain_core::Error> for CliError {
    fn from(e: tvgain_core::Error) -> Self {
        match e {
            tvgain_core::Error::Infeasible(_) | tvgain_core::Error::NoExcitation => CliError::Infeasible(e),
            other => CliError::Core(other),
        }
    }
}

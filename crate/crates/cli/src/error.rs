use std::path::PathBuf;

use thiserror::Error;

/// Failures of a CLI run, each mapped to a distinct exit status.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error at {location}: {message}")]
    Config { location: String, message: String },

    #[error("{failed} of {total} checks exceeded their tolerance")]
    Tolerance { failed: usize, total: usize },

    #[error(transparent)]
    Budget(spectral_taylor::Error),

    #[error("numerical error: {0}")]
    Numerical(spectral_taylor::Error),

    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn config(location: impl Into<String>, message: impl ToString) -> Self {
        CliError::Config {
            location: location.into(),
            message: message.to_string(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } => 2,
            CliError::Tolerance { .. } => 3,
            CliError::Budget(_) => 4,
            CliError::Numerical(_) | CliError::Io { .. } => 1,
        }
    }
}

impl From<spectral_taylor::Error> for CliError {
    fn from(e: spectral_taylor::Error) -> Self {
        match e {
            spectral_taylor::Error::BudgetExceeded { .. } => CliError::Budget(e),
            other => CliError::Numerical(other),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

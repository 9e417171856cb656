use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("{0}")]
    Parse(String),

    #[error("{0}")]
    Domain(String),

    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Parse(_) => 3,
            CliError::Domain(_) => 4,
            CliError::Internal(_) => 5,
        }
    }

    pub fn io(path: &Path, e: std::io::Error) -> Self {
        CliError::Internal(format!("{}: {e}", path.display()))
    }

    /// Library error raised while handling `path`.
    pub fn lib_in(path: &Path, e: markov_stability::Error) -> Self {
        let msg = format!("{}: {e}", path.display());
        match e {
            markov_stability::Error::Parse { .. } => CliError::Parse(msg),
            markov_stability::Error::Domain(_) => CliError::Domain(msg),
            markov_stability::Error::Generation(_) => CliError::Internal(msg),
        }
    }
}

impl From<markov_stability::Error> for CliError {
    fn from(e: markov_stability::Error) -> Self {
        match e {
            markov_stability::Error::Parse { .. } => CliError::Parse(e.to_string()),
            markov_stability::Error::Domain(m) => CliError::Domain(m),
            markov_stability::Error::Generation(_) => CliError::Internal(e.to_string()),
        }
    }
}

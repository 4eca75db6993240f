use std::io;
use std::path::PathBuf;

use fairteams::datagen::RosterError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{}: {source}", path.display())]
    Roster { path: PathBuf, source: RosterError },
    #[error("{}: {source}", path.display())]
    Config {
        path: PathBuf,
        source: toml::de::Error,
    },
    #[error("{context}: {source}")]
    Csv { context: String, source: csv::Error },
    #[error("line {line}: {message}")]
    Assignment { line: u64, message: String },
    #[error(transparent)]
    Core(#[from] fairteams::Error),
    #[error("{0}")]
    Invalid(String),
}

impl HarnessError {
    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        HarnessError::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit status: 2 for file-system failures, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Io { .. } => 2,
            HarnessError::Roster { source, .. } if source.is_io() => 2,
            HarnessError::Csv { source, .. } if source.is_io_error() => 2,
            _ => 1,
        }
    }
}

pub type Result<T, E = HarnessError> = std::result::Result<T, E>;

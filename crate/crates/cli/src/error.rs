use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// An input file could not be read or parsed.
    #[error("{}: {source}", path.display())]
    Input {
        path: PathBuf,
        #[source]
        source: toplag::Error,
    },

    #[error("invalid arguments: {0}")]
    Usage(String),

    #[error(transparent)]
    Run(#[from] anyhow::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Input { .. } | Self::Usage(_) => 2,
            Self::Run(_) => 1,
        }
    }

    pub fn input(path: impl Into<PathBuf>, source: toplag::Error) -> Self {
        Self::Input {
            path: path.into(),
            source,
        }
    }
}

impl From<toplag::Error> for CliError {
    fn from(e: toplag::Error) -> Self {
        Self::Run(e.into())
    }
}

pub type CliResult<T> = Result<T, CliError>;

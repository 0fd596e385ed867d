use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("{}: {message}", path.display())]
    Artifact { path: PathBuf, message: String },
    #[error("training diverged at epoch {epoch}")]
    Diverged { epoch: usize },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(binae::Error),
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    pub fn artifact(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        CliError::Artifact {
            path: path.into(),
            message: message.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// 0 success, 2 config, 3 artifact format, 4 divergence. Plain IO
    /// failures count as artifact errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Artifact { .. } | CliError::Io { .. } => 3,
            CliError::Diverged { .. } => 4,
            CliError::Core(e) => match e {
                binae::Error::Config(_) | binae::Error::Argument(_) => 2,
                binae::Error::Diverged { .. } => 4,
                _ => 3,
            },
        }
    }
}

impl From<binae::Error> for CliError {
    fn from(e: binae::Error) -> Self {
        match e {
            binae::Error::Config(msg) => CliError::Config(msg),
            binae::Error::Diverged { epoch } => CliError::Diverged { epoch },
            other => CliError::Core(other),
        }
    }
}

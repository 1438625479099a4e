use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum EpError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("container {path}: {msg}")]
    Container { path: PathBuf, msg: String },
    #[error(transparent)]
    Core(#[from] faddeev_core::Error),
    #[error("validation failed: {0}")]
    Validation(String),
}

pub type EpResult<T> = Result<T, EpError>;

impl EpError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        EpError::Io { path: path.into(), source }
    }

    /// Process exit status for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            EpError::Validation(_) => 2,
            _ => 1,
        }
    }
}

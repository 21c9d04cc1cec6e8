use std::path::PathBuf;

/// Errors raised by the runner.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid config at `{path}`: {reason}")]
    ConfigInvalid { path: String, reason: String },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("{context}: {source}")]
    Core {
        context: String,
        #[source]
        source: ahrad_core::Error,
    },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("serialization: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn config(path: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::ConfigInvalid { path: path.into(), reason: reason.into() }
    }

    /// Field path of a configuration error.
    pub fn config_path(&self) -> Option<&str> {
        match self {
            Error::ConfigInvalid { path, .. } => Some(path),
            _ => None,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

/// Attaches a context line to core errors.
pub trait Context<T> {
    fn context(self, what: impl Into<String>) -> Result<T>;
}

impl<T> Context<T> for ahrad_core::Result<T> {
    fn context(self, what: impl Into<String>) -> Result<T> {
        self.map_err(|source| Error::Core { context: what.into(), source })
    }
}

/// Wraps an IO error with its path.
pub fn io_at(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> Error {
    let path = path.into();
    move |source| Error::Io { path, source }
}

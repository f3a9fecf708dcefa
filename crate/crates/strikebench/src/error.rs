use std::path::PathBuf;

/// Errors produced by ingestion, mining, scoring, and evaluation.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A malformed line in an input file, with its 1-based line number.
    #[error("{path}:{line}: {message}", path = .path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
    /// Input data violates a structural contract (chronology, coverage, ...).
    #[error("validation error: {0}")]
    Validation(String),
    /// A parameter is outside its admissible range.
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn parse(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

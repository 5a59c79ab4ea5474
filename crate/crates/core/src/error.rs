use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid mismatch: {left} vs {right}")]
    GridMismatch { left: String, right: String },

    #[error("operation requires a real-valued field")]
    NotReal,

    /// A documented precondition of an operation or theorem regime does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid spectrum: {0}")]
    Spectrum(String),

    #[error("time grid mismatch: {0}")]
    TimeMismatch(String),

    #[error("degenerate corpus: {0}")]
    DegenerateCorpus(String),

    #[error("blow-up at step {step}: norm {norm:e} exceeds {limit:e}")]
    BlowUp { step: usize, norm: f64, limit: f64 },

    #[error("malformed snapshot: {0}")]
    Format(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the library.
///
/// The variants are grouped so that a front end can map them onto exit
/// codes: configuration problems, statistical/domain preconditions and I/O.
#[derive(Debug, Error)]
pub enum Error {
    #[error("ingestion error at row {row}, column {column:?}: {message}")]
    Ingestion {
        row: usize,
        column: String,
        message: String,
    },

    #[error("duplicate timestamp {date} at row {row}")]
    DuplicateTimestamp { date: chrono::NaiveDate, row: usize },

    #[error("domain error at index {index}: {message}")]
    Domain { index: usize, message: String },

    #[error("timestamp intersection of the input series is empty")]
    EmptyIntersection,

    #[error("singular design matrix: {0}")]
    SingularDesign(String),

    #[error("insufficient observations: need at least {needed}, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("no explosive trend: estimated growth rate {0} is not positive")]
    NoExplosiveTrend(f64),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("I/O error on {path:?}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

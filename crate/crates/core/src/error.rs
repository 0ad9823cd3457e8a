//! Error type shared by all simulation stages.

use thiserror::Error;

/// Errors produced by loading, validation and the numerical pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: parse error: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error("{path}:{line}: unsupported geometry: {message}")]
    UnsupportedGeometry {
        path: String,
        line: usize,
        message: String,
    },

    #[error("mesh validation failed: {0}")]
    InvalidMesh(String),

    #[error("marker track format error: {0}")]
    MarkerFormat(String),

    #[error("marker timestamps out of order: {0}")]
    MarkerOrdering(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("requested span exceeds available data: {0}")]
    SpanOutOfRange(String),

    #[error("regression system has {rows} rows for {columns} unknowns")]
    Underdetermined { rows: usize, columns: usize },

    #[error("singular regression system (condition estimate {condition:.3e})")]
    Singular { condition: f64 },

    #[error("dimension mismatch: {0}")]
    ShapeMismatch(String),

    #[error("reference matrix is identically zero")]
    ZeroReference,

    #[error("binary format error in {path}: {message}")]
    BinaryFormat { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

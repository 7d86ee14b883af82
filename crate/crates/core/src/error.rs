use thiserror::Error;

/// Errors raised by the clustering toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error at row {row}: {message}")]
    Parse { row: usize, message: String },

    #[error("non-numeric cell at row {row}, column {col}: {value:?}")]
    NonNumeric { row: usize, col: usize, value: String },

    #[error("io error: {0}")]
    Io(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("insufficient overlap between rows {i} and {j}: {overlap} jointly present columns (need 3)")]
    InsufficientOverlap { i: usize, j: usize, overlap: usize },

    #[error("zero variance on the overlap of rows {i} and {j}")]
    DegeneratePair { i: usize, j: usize },

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("no eigenvalue lies outside the Wishart band [{lambda_min}, {lambda_max}]")]
    DegenerateSpectrum { lambda_min: f64, lambda_max: f64 },

    #[error("unsupported input: {0}")]
    Unsupported(String),

    #[error("cluster {cluster} has zero intra-cluster correlation sum")]
    DegenerateCluster { cluster: usize },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("temperature grid has {0} points; at least 3 are required")]
    InsufficientGrid(usize),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse {
            row: e.line(),
            message: e.to_string(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

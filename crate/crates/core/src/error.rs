use std::path::PathBuf;

/// Errors produced by the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Invalid parameters or inconsistent configuration.
    #[error("configuration error: {0}")]
    Config(String),

    /// Inputs whose shapes disagree.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    /// Inputs that are valid in shape but carry no usable signal
    /// (zero range, identical points).
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// A validity index was requested for fewer than two clusters.
    #[error("silhouette is undefined for K = {0} (needs K >= 2)")]
    UndefinedIndex(usize),

    /// A graph, distance matrix or assignment violated its invariants.
    #[error("invariant violated: {0}")]
    Invariant(String),

    /// Numerical routine failed.
    #[error("numeric error: {0}")]
    Numeric(String),

    /// Parse error with 1-based line number.
    #[error("{path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },

    /// Every replicate of a scenario failed.
    #[error("aggregation error: {0}")]
    Aggregation(String),

    #[error("i/o error on {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by bad user input or configuration rather
    /// than a runtime failure.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::Config(_) | Error::Parse { .. } | Error::Json(_) | Error::Io { .. }
        )
    }
}

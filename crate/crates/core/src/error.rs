use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    /// A value fell outside the domain of the function it was passed to.
    #[error("domain error: {0}")]
    Domain(String),

    /// Input was well-formed but carries no information (e.g. a fit over
    /// points that all share one x value).
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// A shift was applied to a task whose noise model cannot carry it.
    #[error("incompatible shift: {0}")]
    Incompatible(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("classifier weight vector is identically zero")]
    ZeroClassifier,

    #[error("solver did not converge after {iterations} iterations (optimality gap {gap:e})")]
    NonConvergence { iterations: usize, gap: f64 },

    #[error("config error: {0}")]
    Config(String),

    #[error("schema error at row {row}, column {column}: {message}")]
    Schema {
        row: usize,
        column: String,
        message: String,
    },

    #[error("i/o error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

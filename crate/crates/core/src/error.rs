use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the simulator, the analytic evaluator, the bandit layer and the harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("singular distance: a transmitter coincides with the receiver at ({x}, {y})")]
    SingularDistance { x: f64, y: f64 },

    #[error("non-integrable path loss: exponent {exponent} must exceed 2")]
    NonIntegrablePathLoss { exponent: f64 },

    #[error("numerical non-convergence in {what}: error estimate {estimate:e} above tolerance {tolerance:e}")]
    NonConvergence {
        what: &'static str,
        estimate: f64,
        tolerance: f64,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("unplayed arm {arm}: discounted mean is undefined")]
    UnplayedArm { arm: usize },

    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("config error in `{field}`: {reason}")]
    Config { field: String, reason: String },

    #[error("nothing to emit: {0}")]
    EmptyResults(String),

    #[error("I/O error at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field,
            reason: reason.into(),
        }
    }

    pub(crate) fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NonConvergence { .. } => 3,
            Error::Io { .. } => 4,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

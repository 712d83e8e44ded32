use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// An objective query failed or produced a non-finite value. `index` is the
    /// position of the offending sample within the batch being evaluated.
    #[error("evaluation failed at sample {index}: {message}")]
    Evaluation { index: usize, message: String },

    /// The search direction is too short to normalize.
    #[error("degenerate gradient (norm {norm:e})")]
    DegenerateGradient { norm: f64 },

    #[error("objective setup failed: {0}")]
    Setup(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Re-labels an evaluation failure with a new sample index.
    pub(crate) fn at_index(self, index: usize) -> Self {
        match self {
            Error::Evaluation { message, .. } => Error::Evaluation { index, message },
            other => other,
        }
    }
}

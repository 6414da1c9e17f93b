use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the kinematic model and the simulator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("infeasible constraints: {0}")]
    Infeasible(String),

    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    /// The robot cannot be placed in the pipe without exceeding a spring or tilt limit.
    #[error("no fit: {0}")]
    NoFit(String),

    #[error("out of bounds: {0}")]
    OutOfBounds(String),

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("i/o error on {path}: {message}")]
    Io { path: PathBuf, message: String },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, err: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            message: err.to_string(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

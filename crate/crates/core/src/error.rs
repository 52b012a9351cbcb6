//! Crate-wide error type.

use std::fmt;
use std::io;

/// Errors produced by any layer of the pipeline.
#[derive(Debug)]
pub enum Error {
    /// A precondition on an argument was violated.
    InvalidArgument(String),
    /// Orientation extraction hit a degenerate configuration (gimbal lock).
    DegenerateOrientation(String),
    /// Too few samples for an operation with a minimum-size requirement.
    InsufficientData(String),
    /// A text file failed to parse; carries the 1-based line number.
    Parse { line: usize, message: String },
    /// Input data violated a validity constraint (not a syntax problem).
    Data(String),
    /// Model/layer configuration is inconsistent with the data it was given.
    Config(String),
    /// Sliding-window assembly found a gap or a count mismatch at a frame.
    Assembly { frame: usize, message: String },
    /// The streaming wire protocol was violated.
    Protocol(String),
    /// Checkpoint file is unreadable: bad magic, version, or truncation.
    Checkpoint(String),
    /// Training diverged (non-finite loss); names the epoch and batch.
    Divergence { epoch: usize, batch: usize },
    Io(io::Error),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidArgument(m) => write!(f, "invalid argument: {m}"),
            Error::DegenerateOrientation(m) => write!(f, "degenerate orientation: {m}"),
            Error::InsufficientData(m) => write!(f, "insufficient data: {m}"),
            Error::Parse { line, message } => write!(f, "parse error at line {line}: {message}"),
            Error::Data(m) => write!(f, "data error: {m}"),
            Error::Config(m) => write!(f, "configuration error: {m}"),
            Error::Assembly { frame, message } => {
                write!(f, "assembly error at frame {frame}: {message}")
            }
            Error::Protocol(m) => write!(f, "protocol error: {m}"),
            Error::Checkpoint(m) => write!(f, "checkpoint error: {m}"),
            Error::Divergence { epoch, batch } => {
                write!(f, "training diverged: non-finite loss at epoch {epoch}, batch {batch}")
            }
            Error::Io(e) => write!(f, "io error: {e}"),
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::Io(e) => Some(e),
            _ => None,
        }
    }
}

impl From<io::Error> for Error {
    fn from(e: io::Error) -> Self {
        Error::Io(e)
    }
}

pub type Result<T> = std::result::Result<T, Error>;

use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Caller supplied an argument outside the operation's domain.
    #[error("usage error: {0}")]
    Usage(String),

    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("payload too large: {requested} bits requested (incl. 32-bit header), capacity is {capacity} bits")]
    PayloadTooLarge { capacity: u64, requested: u64 },

    #[error("bad header: declared payload of {declared} bits but only {available} bits are extractable")]
    BadHeader { declared: u64, available: u64 },

    #[error("invalid embedded pattern at superpixel ({row}, {col}): position {position} exceeds 2^{bits}")]
    InvalidEmbeddedPattern {
        row: usize,
        col: usize,
        position: usize,
        bits: u32,
    },

    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("truncated data: expected {expected} bytes, found {actual}")]
    Truncated { expected: usize, actual: usize },

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub(crate) fn dimension(msg: impl Into<String>) -> Self {
        Error::Dimension(msg.into())
    }

    pub(crate) fn parse(offset: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            offset,
            message: msg.into(),
        }
    }

    /// True for errors caused by arguments or capacity rather than by the
    /// environment (I/O) or malformed input files.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::Usage(_) | Error::Dimension(_) | Error::PayloadTooLarge { .. }
        )
    }
}

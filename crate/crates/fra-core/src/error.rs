//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by dataset handling, simulation, training, and I/O.
#[derive(Debug, Error)]
pub enum Error {
    /// An operation was called with inputs outside its domain.
    #[error("domain error: {0}")]
    Domain(String),
    /// A file did not match the expected on-disk format.
    #[error("format error at byte {offset}: {message}")]
    Format { offset: u64, message: String },
    /// A numerical procedure failed (singular system, divergence, non-finite values).
    #[error("numerical error ({context}): {message}")]
    Numerical { context: String, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn domain(message: impl Into<String>) -> Self {
        Error::Domain(message.into())
    }

    pub fn format(offset: u64, message: impl Into<String>) -> Self {
        Error::Format {
            offset,
            message: message.into(),
        }
    }

    pub fn numerical(context: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Numerical {
            context: context.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

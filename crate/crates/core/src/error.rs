use std::path::PathBuf;

use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid base {0}: supported range is 2..=256")]
    InvalidBase(u32),

    #[error("invalid modulus {0}: must be at least 2")]
    InvalidModulus(u64),

    #[error("{what} is out of domain: {detail}")]
    OutOfDomain { what: &'static str, detail: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("incompatible counter banks: {0}")]
    IncompatibleBanks(String),

    #[error("string of length {len} is shorter than block length {k}")]
    InsufficientLength { len: usize, k: usize },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("checkpoint {path} failed integrity check at byte offset {offset}: {reason}")]
    Integrity {
        path: PathBuf,
        offset: u64,
        reason: String,
    },

    #[error("checkpoint {path} has version {found}, expected {expected}")]
    Version {
        path: PathBuf,
        found: u32,
        expected: u32,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn domain(what: &'static str, detail: impl Into<String>) -> Self {
        Error::OutOfDomain {
            what,
            detail: detail.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

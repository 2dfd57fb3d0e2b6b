use thiserror::Error;

/// Errors raised by the library.
///
/// Variants are grouped so that front ends can map them onto exit codes:
/// everything except [`Error::Io`] is a domain or argument failure.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected} qubits, got {found}")]
    Dimension { expected: usize, found: usize },

    #[error("{n_qubits} qubits exceeds the configured maximum of {max}")]
    Size { n_qubits: usize, max: usize },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("correlation tensor is unphysical: minimum eigenvalue {min_eigenvalue:e}")]
    UnphysicalTensor { min_eigenvalue: f64 },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("invalid projection spec: {0}")]
    InvalidSpec(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl From<serde_json::Error> for Error {
    fn from(err: serde_json::Error) -> Self {
        Error::Parse(err.to_string())
    }
}

pub(crate) fn check_qubits(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::Dimension { expected, found })
    }
}

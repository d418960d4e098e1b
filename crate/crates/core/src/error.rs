use std::io;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("malformed transcript: {0}")]
    MalformedTranscript(String),

    #[error("malformed certificate: {0}")]
    MalformedCertificate(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("prover failure: {0}")]
    Prover(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    pub(crate) fn malformed(msg: impl Into<String>) -> Self {
        Error::MalformedCertificate(msg.into())
    }
}

use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("qubit index {index} out of range for a {n_qubits}-qubit state")]
    QubitOutOfRange { index: usize, n_qubits: usize },

    #[error("gate targets must be distinct")]
    DuplicateTargets,

    #[error("state of {requested} qubits exceeds the oracle cap of {cap}")]
    QubitCap { requested: usize, cap: usize },

    #[error("forced measurement outcome has zero probability (qubit {qubit})")]
    ZeroProbabilityBranch { qubit: usize },

    #[error("length mismatch: expected {expected}, got {actual} ({what})")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("malformed link chain: {0}")]
    MalformedChain(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("failed to write {path}: {source}")]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}

pub(crate) fn check_probability(name: &'static str, p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(invalid(name, format!("{p} is not in [0, 1]")))
    }
}

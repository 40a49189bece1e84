use thiserror::Error;

use crate::spacetime::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("state is not normalized (norm² = {0})")]
    NotNormalized(f64),

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("qubit index {index} out of range for a {qubits}-qubit register")]
    QubitIndex { index: usize, qubits: usize },

    #[error("register of {0} qubits exceeds the supported maximum of {max}", max = crate::quantum::MAX_QUBITS)]
    TooManyQubits(usize),

    #[error("invalid parameter `{field}`: {reason}")]
    Param { field: &'static str, reason: String },

    #[error("schedule is causally invalid ({} violation(s))", .0.len())]
    Causal(Vec<Violation>),

    #[error("protocol stage error: {0}")]
    Stage(String),
}

impl Error {
    pub(crate) fn param(field: &'static str, reason: impl Into<String>) -> Self {
        Error::Param { field, reason: reason.into() }
    }
}

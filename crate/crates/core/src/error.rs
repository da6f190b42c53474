use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid qubit count {0}: must be between 1 and {max}", max = crate::qstate::Dimension::MAX_QUBITS)]
    InvalidDimension(u32),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("state is not normalized: norm {0}")]
    NotNormalized(f64),

    #[error("matrix is not unitary: max deviation {0:e}")]
    NotUnitary(f64),

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("operation requires {0}")]
    Precondition(String),

    #[error("query budget exhausted after {used} queries")]
    BudgetExhausted { used: u64 },

    #[error("copies of record {record} exhausted")]
    CopiesExhausted { record: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("target error {epsilon} is unreachable: {reason}")]
    Unreachable { epsilon: f64, reason: String },

    #[error("enumeration too large: N = {n} exceeds cap {cap}")]
    TooLarge { n: usize, cap: usize },

    #[error("i/o: {0}")]
    Io(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

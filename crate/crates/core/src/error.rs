//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit count {n} exceeds the supported maximum of {max}")]
    TooManyQubits { n: usize, max: usize },
    #[error("amplitude vector length {len} is not a power of two")]
    NotPowerOfTwo { len: usize },
    #[error("state norm {norm} differs from 1 beyond tolerance")]
    NotNormalized { norm: f64 },
    #[error("qubit index {index} out of range for {n_qubits} qubits")]
    QubitOutOfRange { index: usize, n_qubits: usize },
    #[error("operands act on different qubit counts: {left} vs {right}")]
    QubitCountMismatch { left: usize, right: usize },
    #[error("expected {expected} parameters, got {actual}")]
    ParameterCount { expected: usize, actual: usize },
    #[error("matrix is {rows}x{cols}, expected square of size {expected}")]
    MatrixShape {
        rows: usize,
        cols: usize,
        expected: usize,
    },
    #[error("{0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

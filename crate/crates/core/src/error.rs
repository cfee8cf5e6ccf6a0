use thiserror::Error;

/// Errors produced by state algebra, classification and the protocol engine.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("register of {qubits} qubits exceeds the 4-qubit (dim 16) limit")]
    RegisterTooLarge { qubits: usize },
    #[error("dimension {dim} is not a power of two")]
    NotPowerOfTwo { dim: usize },
    #[error("state is not normalized (|amplitudes|^2 sums to {norm_sq})")]
    NotNormalized { norm_sq: f64 },
    #[error("matrix is not Hermitian within tolerance")]
    NotHermitian,
    #[error("matrix trace is {trace}, expected 1")]
    BadTrace { trace: f64 },
    #[error("matrix has eigenvalue {eig} below the positivity tolerance")]
    NotPositiveSemidefinite { eig: f64 },
    #[error("matrix is not unitary within tolerance")]
    NotUnitary,
    #[error("measurement basis is not orthonormal or does not span the subspace")]
    NotOrthonormal,
    #[error("invalid probability distribution: {0}")]
    InvalidDistribution(String),
    #[error("invalid protocol cost: q_t + b_t must be positive")]
    ZeroCostDenominator,
    #[error("invalid attack program: {0}")]
    InvalidAttack(String),
    #[error(
        "sequential-access violation: storage ring length {ring} must exceed \
         half the path length {path}"
    )]
    SequentialAccessViolation { ring: f64, path: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

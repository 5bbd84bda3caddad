use thiserror::Error;

/// Errors raised by channel construction, circuit assembly and experiment drivers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not unitary (deviation {0:.3e})")]
    NotUnitary(f64),

    #[error("matrix is not Hermitian (deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("Kraus operators are not complete (deviation {0:.3e})")]
    IncompleteKraus(f64),

    #[error("channel has an imaginary Pauli-transfer entry of {0:.3e}")]
    ComplexPtm(f64),

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("invalid noise settings: {0}")]
    InvalidNoise(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("diagnostic failure: {0}")]
    Diagnostic(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

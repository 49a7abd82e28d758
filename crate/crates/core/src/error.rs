use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix is not Hermitian (‖M − M*‖ = {0:.3e})")]
    NotHermitian(f64),

    #[error("decomposition failed: {0}")]
    Decomposition(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("Kraus set is not trace preserving (‖ΣF*F − I‖ = {0:.3e})")]
    NotTracePreserving(f64),

    #[error("Choi matrix is not positive semidefinite (smallest eigenvalue {0:.3e})")]
    NotPsd(f64),

    #[error("invalid solver configuration: {0}")]
    Config(String),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

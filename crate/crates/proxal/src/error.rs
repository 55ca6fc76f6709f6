use thiserror::Error;

/// Library-wide error type.
#[derive(Debug, Error)]
pub enum ProxalError {
    /// A caller violated an interface contract (wrong dimension, bad parameter).
    #[error("usage error: {0}")]
    Usage(String),

    /// A proximal subproblem has no minimizer (prox-boundedness violated) or a
    /// set required by a projection is empty.
    #[error("infeasible: {0}")]
    Infeasible(String),

    /// File or serialization failure.
    #[error("io error: {0}")]
    Io(String),
}

impl ProxalError {
    pub fn usage(msg: impl Into<String>) -> Self {
        ProxalError::Usage(msg.into())
    }

    pub fn infeasible(msg: impl Into<String>) -> Self {
        ProxalError::Infeasible(msg.into())
    }
}

impl From<std::io::Error> for ProxalError {
    fn from(e: std::io::Error) -> Self {
        ProxalError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, ProxalError>;

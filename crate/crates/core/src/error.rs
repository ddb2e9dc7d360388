use thiserror::Error;

/// Errors raised by the Hankel PSD/SOS toolkit.
#[derive(Debug, Error)]
pub enum HankelError {
    #[error("point lies outside the effective domain: eta(v5, v6) = {eta} >= 1")]
    OutsideEffectiveDomain { eta: f64 },

    #[error("solver did not converge: {0}")]
    NonConvergence(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid certificate: {0}")]
    InvalidCertificate(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl HankelError {
    /// Process exit code used by the command line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            HankelError::NonConvergence(_) => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, HankelError>;

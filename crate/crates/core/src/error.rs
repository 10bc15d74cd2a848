use thiserror::Error;

/// Errors raised while evaluating means or derivative identities.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum MeanError {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// The result (or an intermediate that must be materialized) is not
    /// representable as a finite, nonzero double.
    #[error("range error: {0}")]
    Range(String),
}

/// Errors raised by the verifier for unusable configurations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum VerifyError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Mean(#[from] MeanError),
}

pub type Result<T, E = MeanError> = std::result::Result<T, E>;

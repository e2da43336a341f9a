use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("zero input where a nonzero value is required")]
    Zero,

    #[error("factorization exceeded budget while factoring {0}")]
    FactorBudget(String),

    #[error("budget exceeded: {0}")]
    Budget(String),

    #[error("invalid field: {0}")]
    InvalidField(String),

    #[error("invalid discriminant {0}: {1}")]
    InvalidDiscriminant(String, String),

    #[error("discriminant mismatch: {0} vs {1}")]
    DiscriminantMismatch(String, String),

    #[error("invalid curve: {0}")]
    InvalidCurve(String),

    #[error("unsupported model: {0}")]
    UnsupportedModel(String),

    #[error("bad prime {0}: {1}")]
    BadPrime(u64, String),

    #[error("invalid certificate: {0}")]
    InvalidCertificate(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("degenerate elimination: {0}")]
    Degenerate(String),

    #[error("parse error: {0}")]
    Parse(String),
}

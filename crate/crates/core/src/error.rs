use thiserror::Error;

/// Errors produced by the sampling, operator and functional layers.
#[derive(Debug, Error)]
pub enum UpError {
    #[error("coefficient vector is empty")]
    EmptyCoeffs,

    #[error("coefficient {index} is not finite")]
    NonFiniteCoeff { index: i64 },

    #[error("shift parameter {0} is outside (0, 1]")]
    DeltaOutOfRange(f64),

    #[error("band limit must be positive, got {0}")]
    InvalidBand(f64),

    #[error(
        "function is not in the domain of x-multiplication: |alternating sum| = {alternating:.3e} exceeds {threshold:.3e}"
    )]
    InadmissibleFunction { alternating: f64, threshold: f64 },

    #[error("operation requires a nonzero function")]
    ZeroFunction,

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("commutator grid identity violated: max deviation {deviation:.3e} > {threshold:.3e}")]
    CommutatorMismatch { deviation: f64, threshold: f64 },

    #[error("every restart produced a degenerate commutator term")]
    AllStartsDegenerate,

    #[error("oracle-confirmed uncertainty ratio {ratio} is below 1")]
    BoundViolation { ratio: f64 },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, UpError>;

impl UpError {
    /// Variant name, for machine-readable reports.
    pub fn kind(&self) -> &'static str {
        match self {
            UpError::EmptyCoeffs => "EmptyCoeffs",
            UpError::NonFiniteCoeff { .. } => "NonFiniteCoeff",
            UpError::DeltaOutOfRange(_) => "DeltaOutOfRange",
            UpError::InvalidBand(_) => "InvalidBand",
            UpError::InadmissibleFunction { .. } => "InadmissibleFunction",
            UpError::ZeroFunction => "ZeroFunction",
            UpError::InvalidGrid(_) => "InvalidGrid",
            UpError::InvalidConfig(_) => "InvalidConfig",
            UpError::CommutatorMismatch { .. } => "CommutatorMismatch",
            UpError::AllStartsDegenerate => "AllStartsDegenerate",
            UpError::BoundViolation { .. } => "BoundViolation",
            UpError::Json(_) => "Json",
        }
    }
}

use thiserror::Error;

/// Errors raised by the certification library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension {dim} exceeds the configured budget {budget}")]
    BudgetExceeded { dim: u128, budget: usize },

    #[error("support mismatch: {0}")]
    SupportMismatch(String),

    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("eigensolver failed to converge: {0}")]
    ConvergenceFailure(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("gate {index} is not unitary (deviation {deviation:e})")]
    NonUnitaryGate { index: usize, deviation: f64 },

    #[error("outcome probabilities of term {term} sum to {total}")]
    ProbabilityLeak { term: usize, total: f64 },

    #[error("no measurement records for term {0}")]
    MissingTerm(usize),

    #[error("ground space is degenerate; certification requires a unique ground state")]
    DegenerateGround,

    #[error("phase resolution too coarse: window {window:e} does not separate scaled gap {scaled_gap:e}")]
    ResolutionTooCoarse { window: f64, scaled_gap: f64 },

    #[error("projection onto the completed subspace failed {0} times in a row")]
    RetryCapExceeded(usize),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable machine-readable name of the error kind.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::BudgetExceeded { .. } => "BudgetExceeded",
            Error::SupportMismatch(_) => "SupportMismatch",
            Error::NotHermitian { .. } => "NotHermitian",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::ConvergenceFailure(_) => "ConvergenceFailure",
            Error::InvalidParameter(_) => "InvalidParameter",
            Error::InvalidState(_) => "InvalidState",
            Error::NonUnitaryGate { .. } => "NonUnitaryGate",
            Error::ProbabilityLeak { .. } => "ProbabilityLeak",
            Error::MissingTerm(_) => "MissingTerm",
            Error::DegenerateGround => "DegenerateGround",
            Error::ResolutionTooCoarse { .. } => "ResolutionTooCoarse",
            Error::RetryCapExceeded(_) => "RetryCapExceeded",
            Error::Parse(_) => "Parse",
            Error::Io(_) => "Io",
            Error::Json(_) => "Json",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid source: {0}")]
    InvalidSource(String),

    #[error("unsupported source for {functional}: {reason}")]
    UnsupportedSource {
        functional: &'static str,
        reason: String,
    },

    #[error("numerical failure in {functional}: {reason}")]
    NumericalFailure {
        functional: &'static str,
        reason: String,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("infeasible distortion: {0}")]
    InfeasibleDistortion(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid certificate: constraint slack {slack:.3e} exceeds tolerance {tolerance:.1e}")]
    InvalidCertificate { slack: f64, tolerance: f64 },

    #[error("discretization rejected: truncation mass {mass:.3e} exceeds {limit:.1e}")]
    Discretization { mass: f64, limit: f64 },

    #[error("degenerate reduction: {0}")]
    DegenerateReduction(String),

    #[error("infeasible construction: {0}")]
    InfeasibleConstruction(String),

    #[error("config: {0}")]
    Config(String),

    #[error("io: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn numerical(functional: &'static str, reason: impl Into<String>) -> Self {
        Error::NumericalFailure {
            functional,
            reason: reason.into(),
        }
    }
}

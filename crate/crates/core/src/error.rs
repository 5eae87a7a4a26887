use thiserror::Error;

/// Errors raised by the analysis and simulation routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix contains non-finite entries")]
    NonFinite,
    #[error("matrix is not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },
    #[error("matrix is not positive semidefinite (smallest eigenvalue {min_eigenvalue:.3e})")]
    NotPsd { min_eigenvalue: f64 },
    #[error("eigenvalue iteration did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
    #[error("invalid density matrix: {0}")]
    InvalidState(String),
    #[error("filter annihilates the state (unnormalized trace {trace:.3e})")]
    FilteredToZero { trace: f64 },
    #[error("conditional probability undefined: marginal {marginal:.3e} for outcome {outcome}")]
    UndefinedConditional { outcome: u8, marginal: f64 },
    #[error("no counts in conditioning row for outcome {outcome} of setting {setting}")]
    ZeroConditioningCounts { setting: String, outcome: u8 },
    #[error("record {setting} has no counts")]
    ZeroCounts { setting: String },
    #[error("model fit diverged (Frobenius residual {residual:.3e})")]
    FitDiverged { residual: f64 },
    #[error("criterion is not monotone in p at gamma = {gamma}")]
    NotMonotone { gamma: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

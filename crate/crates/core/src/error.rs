use thiserror::Error;

use crate::solver::SolveReport;

#[derive(Debug, Error)]
pub enum CsxError {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A hypothesis required by the operation does not hold for the input.
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("solver failure: {message}")]
    SolverFailure {
        message: String,
        report: Option<Box<SolveReport>>,
    },

    /// The computed layer is not strictly increasing.
    #[error("monotonicity violated: {0}")]
    Monotonicity(String),

    #[error("malformed field dump: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = CsxError> = std::result::Result<T, E>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(CsxError::Domain(msg.into()))
}

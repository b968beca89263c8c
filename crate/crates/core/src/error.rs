use thiserror::Error;

/// Errors produced by the solver library.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid input data (dimension mismatch, infeasible weights, bad config).
    #[error("input error: {0}")]
    Input(String),

    /// An operation is not supported for the given variant (e.g. transforming
    /// a tabulated density without gradient data).
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Iterative root finding stalled or oscillated; carries the residual
    /// trace for diagnosis.
    #[error("calibration did not converge after {iterations} iterations (last residual norm {last_residual:.3e})")]
    Convergence {
        iterations: usize,
        last_residual: f64,
        trace: Vec<f64>,
    },

    /// Internal invariant violated; indicates a bug or an inconsistent cost
    /// oracle rather than bad user input.
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn internal(msg: impl Into<String>) -> Self {
        Error::Internal(msg.into())
    }
}

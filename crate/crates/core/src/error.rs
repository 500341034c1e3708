use thiserror::Error;

use crate::eigensolver::EigenDecomposition;

pub type Result<T> = std::result::Result<T, ZsError>;

#[derive(Debug, Error)]
pub enum ZsError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("non-finite potential value at node {index} (x = {x})")]
    NumericDomain { index: usize, x: f64 },

    #[error("QR iteration did not converge within {iterations} steps")]
    NoConvergence {
        iterations: usize,
        partial: Box<EigenDecomposition>,
    },

    #[error("numerical failure: {0}")]
    Numeric(String),

    #[error("field became non-finite at t = {time}")]
    BlowUp { time: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl ZsError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        ZsError::InvalidArgument(msg.into())
    }

    /// True for errors caused by bad input rather than a failed computation.
    pub fn is_usage(&self) -> bool {
        matches!(self, ZsError::InvalidArgument(_))
    }
}

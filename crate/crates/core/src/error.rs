use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or out-of-contract input.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Two computation routes that must agree did not.
    #[error("consistency failure: {0}")]
    Consistency(String),

    /// The root finder exhausted its sweep budget.
    #[error("root finder did not converge after {sweeps} sweeps (max scaled residual {residual:e})")]
    Convergence {
        sweeps: usize,
        residual: f64,
        best: Vec<Complex64>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn consistency(msg: impl Into<String>) -> Self {
        Error::Consistency(msg.into())
    }
}

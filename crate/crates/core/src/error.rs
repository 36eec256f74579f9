use thiserror::Error;

use crate::gauss::GaussError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error(transparent)]
    Gauss(#[from] GaussError),
    #[error("Planck parameters differ: {0} vs {1}")]
    PlanckMismatch(f64, f64),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dim { expected: usize, got: usize },
    #[error("invalid argument: {0}")]
    Invalid(String),
    #[error("point too close to the excluded axis: {0}")]
    Axis(String),
    #[error("no convergence: {0}")]
    Convergence(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn same_h(h1: f64, h2: f64) -> Result<()> {
    if (h1 - h2).abs() > 1e-14 * h1.abs().max(1.0) {
        return Err(Error::PlanckMismatch(h1, h2));
    }
    Ok(())
}

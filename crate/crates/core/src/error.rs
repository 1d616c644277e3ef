use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Failure modes shared by every numerical stage.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the function.
    #[error("domain error: {0}")]
    Domain(String),
    /// Evaluation hit a pole (or a zero of a denominator).
    #[error("pole: {0}")]
    Pole(String),
    /// An iteration ran out of budget before reaching its tolerance.
    #[error("no convergence: {0}")]
    Convergence(String),
    /// A structural assumption failed, e.g. a missing sign change or a
    /// non-monotone branch. Usually points at a series or parameter bug.
    #[error("structure violated: {0}")]
    Structure(String),
    /// Cholesky met a non-positive pivot.
    #[error("matrix is not positive definite: pivot {pivot:e} at row {row}")]
    NotPositiveDefinite { row: usize, pivot: f64 },
    /// The point lies on a branch cut of the inverse spectral map.
    #[error("point on a cut: {0}")]
    OnCut(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn pole(msg: impl Into<String>) -> Self {
        Error::Pole(msg.into())
    }

    pub(crate) fn convergence(msg: impl Into<String>) -> Self {
        Error::Convergence(msg.into())
    }

    pub(crate) fn structure(msg: impl Into<String>) -> Self {
        Error::Structure(msg.into())
    }
}

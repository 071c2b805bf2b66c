use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A special case of invalid input: operands of incompatible size.
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not positive semidefinite (smallest eigenvalue {0:e})")]
    NotPsd(f64),

    #[error("matrix is not positive definite (smallest eigenvalue {0:e})")]
    NotPd(f64),

    #[error("singular block operator: {0}")]
    SingularBlock(String),

    #[error("singular coefficient transform (determinant {0:e})")]
    SingularTransform(f64),

    #[error("hypothesis unmet: {0}")]
    HypothesisUnmet(String),

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

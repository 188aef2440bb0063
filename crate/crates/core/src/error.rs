use thiserror::Error;

/// Errors raised by the factorizations and solvers in this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("zero pivot {value:e} at index {index} in banded LU")]
    SingularPivot { index: usize, value: f64 },

    #[error("matrix is not positive definite (Cholesky breakdown)")]
    NotPositiveDefinite,

    #[error("matrix is not skew-symmetric (defect {defect:e})")]
    NotSkewSymmetric { defect: f64 },

    #[error("defective pencil: eigenvector matrix condition number {cond:e}")]
    DefectivePencil { cond: f64 },

    #[error("singular block {block}: {detail}")]
    SingularBlock { block: usize, detail: String },

    #[error("arrowhead split requires a positive {quantity}, got {value:e}")]
    ArrowheadPositivity { quantity: &'static str, value: f64 },

    #[error("Kronecker factor is not an arrowhead (off-pattern magnitude {defect:e})")]
    NotArrowhead { defect: f64 },

    #[error("imaginary part of a real solution is too large (relative {ratio:e})")]
    ImaginaryResidue { ratio: f64 },

    #[error("point {x} lies outside the spline domain [{lo}, {hi}]")]
    OutsideDomain { x: f64, lo: f64, hi: f64 },

    #[error("nonpositive Jacobian determinant {det:e} at parametric point {point:?}")]
    Geometry { point: Vec<f64>, det: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

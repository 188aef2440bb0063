//! Matrix containers and the structured kernels every solver is built on.
//!
//! Dense matrices are plain `nalgebra` matrices. Real and complex are kept as
//! separate types; promotion from real to complex is always explicit through
//! [`to_complex`].
//!
//! Vectors living on a space-time grid are stored time-outer: entry
//! `j * n_s + i` belongs to time function `j` and space function `i`.

mod banded;
mod csr;
mod kron;
mod market;
mod shuffle;

pub use banded::{banded_lu_factor, banded_lu_solve, BandedLu, BandedMatrix};
pub use csr::CsrMatrix;
pub use kron::{kron_dense, kron_matvec, KronOperator};
pub(crate) use kron::kron_matvec_counted;
pub use market::{write_matrix_market, MatrixMarket};
pub use shuffle::ShufflePermutation;

use nalgebra::{ComplexField, DMatrix};
use num_complex::Complex64;

pub type DenseMatrix = DMatrix<f64>;
pub type ComplexMatrix = DMatrix<Complex64>;

/// Promotes a real matrix to the complex variant.
pub fn to_complex(m: &DenseMatrix) -> ComplexMatrix {
    m.map(|v| Complex64::new(v, 0.0))
}

/// 2-norm condition number `sigma_max / sigma_min` from a full SVD.
///
/// Returns `f64::INFINITY` for singular (or non-square, or non-finite) input.
pub fn cond2<T>(m: &DMatrix<T>) -> f64
where
    T: ComplexField<RealField = f64>,
{
    if !m.is_square() || m.nrows() == 0 {
        return f64::INFINITY;
    }
    if m.iter().any(|v| !v.clone().is_finite()) {
        return f64::INFINITY;
    }
    let sv = m.clone().singular_values();
    let max = sv.iter().cloned().fold(0.0_f64, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if min <= 0.0 || !min.is_finite() {
        f64::INFINITY
    } else {
        max / min
    }
}

pub mod cond_table;
pub mod precond;
pub mod scaling;
pub mod solve;
pub mod verify;

use heatkron::problem::time_space;
use heatkron::spline::{assemble_1d, MatrixKind};
use heatkron::tensor::DenseMatrix;

use crate::CliError;

/// Dense `(A_t, M_t)` for `n` time dofs of degree `p`.
pub fn time_pair(p: usize, n: usize) -> Result<(DenseMatrix, DenseMatrix), CliError> {
    let s = time_space(p, n)?;
    Ok((assemble_1d(&s, MatrixKind::Advection).to_dense(), assemble_1d(&s, MatrixKind::Mass).to_dense()))
}

pub fn rel_diff(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    let den: f64 = b.iter().map(|y| y * y).sum::<f64>().sqrt();
    if den > 0.0 {
        num / den
    } else {
        num
    }
}

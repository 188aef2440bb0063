use nalgebra::{ComplexField, DMatrix, Schur};
use num_complex::Complex64;

use super::jacobi_eigen;
use crate::error::{check_len, Error, Result};
use crate::tensor::{cond2, to_complex, ComplexMatrix, DenseMatrix};

/// Condition number of the eigenvector matrix above which a pencil is
/// treated as non-diagonalizable.
pub const DEFECTIVE_COND: f64 = 1e15;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalization {
    /// `U^* M U = I`.
    MOrthonormal,
    /// Each column has unit 2-norm.
    UnitColumns,
}

/// `A U = M U diag(values)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeigResult<T: ComplexField> {
    pub vectors: DMatrix<T>,
    pub values: Vec<T>,
    pub normalization: Normalization,
}

impl<T: ComplexField<RealField = f64> + Copy> GeigResult<T> {
    /// `‖A U - M U Λ‖_F / ‖A‖_F` for the pencil this result was computed from.
    pub fn residual(&self, a: &DMatrix<T>, m: &DMatrix<T>) -> f64 {
        let mut mul = m * &self.vectors;
        for (j, lam) in self.values.iter().enumerate() {
            for v in mul.column_mut(j).iter_mut() {
                *v *= *lam;
            }
        }
        let r = a * &self.vectors - mul;
        r.norm() / a.norm().max(f64::MIN_POSITIVE)
    }
}

fn max_abs(m: &DenseMatrix) -> f64 {
    m.iter().fold(0.0, |acc, v| acc.max(v.abs()))
}

fn check_square_pair(a: &DenseMatrix, m: &DenseMatrix) -> Result<()> {
    if !a.is_square() {
        return Err(Error::InvalidInput("pencil matrix must be square".into()));
    }
    check_len(a.nrows(), m.nrows())?;
    check_len(a.ncols(), m.ncols())
}

fn cholesky_factor(m: &DenseMatrix) -> Result<DenseMatrix> {
    let sym = (m - m.transpose()).iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
    if sym > 1e-12 * max_abs(m) {
        return Err(Error::InvalidInput(format!("mass matrix not symmetric (defect {sym:e})")));
    }
    m.clone()
        .cholesky()
        .map(|c| c.l())
        .ok_or(Error::NotPositiveDefinite)
}

/// `L^{-1} A L^{-T}` for lower triangular `L`.
fn whiten(l: &DenseMatrix, a: &DenseMatrix) -> DenseMatrix {
    let x = l.solve_lower_triangular(a).expect("Cholesky factor is nonsingular");
    l.solve_lower_triangular(&x.transpose())
        .expect("Cholesky factor is nonsingular")
        .transpose()
}

/// Symmetric-definite pencil by Cholesky whitening and cyclic Jacobi.
/// Eigenvalues ascending, eigenvectors `M`-orthonormal.
pub fn sym_pd_geig(a: &DenseMatrix, m: &DenseMatrix) -> Result<GeigResult<f64>> {
    check_square_pair(a, m)?;
    let asym = (a - a.transpose()).iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
    if asym > 1e-12 * max_abs(a).max(f64::MIN_POSITIVE) {
        return Err(Error::InvalidInput(format!("stiffness matrix not symmetric (defect {asym:e})")));
    }
    let l = cholesky_factor(m)?;
    let mut c = whiten(&l, a);
    c = 0.5 * (&c + c.transpose());
    let (vals, v) = jacobi_eigen(&c);
    let u = l.transpose().solve_upper_triangular(&v).expect("Cholesky factor is nonsingular");

    let mut order: Vec<usize> = (0..vals.len()).collect();
    order.sort_by(|&i, &j| vals[i].total_cmp(&vals[j]));
    let vectors = DenseMatrix::from_fn(u.nrows(), u.ncols(), |r, k| u[(r, order[k])]);
    Ok(GeigResult {
        vectors,
        values: order.iter().map(|&k| vals[k]).collect(),
        normalization: Normalization::MOrthonormal,
    })
}

/// Skew-symmetric `A` against SPD `M`.
///
/// With `M = L L^T`, `K = L^{-1} A L^{-T}` is skew, so `iK` is Hermitian. Its
/// eigenpairs give purely imaginary pencil eigenvalues and complex
/// `M`-orthonormal eigenvectors. Eigenvalues are sorted by imaginary part.
pub fn skew_geig(a: &DenseMatrix, m: &DenseMatrix) -> Result<GeigResult<Complex64>> {
    check_square_pair(a, m)?;
    let defect = (a + a.transpose()).iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
    if defect > 1e-12 * max_abs(a).max(1.0) {
        return Err(Error::NotSkewSymmetric { defect });
    }
    let l = cholesky_factor(m)?;
    let mut k = whiten(&l, a);
    k = 0.5 * (&k - k.transpose());
    let h = k.map(|v| Complex64::new(0.0, v));
    let eig = h.symmetric_eigen();
    let lt = to_complex(&l.transpose());
    let u = lt
        .solve_upper_triangular(&eig.eigenvectors)
        .expect("Cholesky factor is nonsingular");
    // iK w = theta w  =>  K w = -i theta w
    let vals: Vec<Complex64> = eig.eigenvalues.iter().map(|&t| Complex64::new(0.0, -t)).collect();
    let mut order: Vec<usize> = (0..vals.len()).collect();
    order.sort_by(|&i, &j| vals[i].im.total_cmp(&vals[j].im));
    Ok(GeigResult {
        vectors: ComplexMatrix::from_fn(u.nrows(), u.ncols(), |r, c| u[(r, order[c])]),
        values: order.iter().map(|&i| vals[i]).collect(),
        normalization: Normalization::MOrthonormal,
    })
}

/// General pencil through `M^{-1} A`, a complex Schur form and triangular
/// back-substitution for the eigenvectors. Columns have unit 2-norm and are
/// ordered by real part, then imaginary part.
///
/// Fails with [`Error::DefectivePencil`] when the eigenvector matrix has
/// condition number above [`DEFECTIVE_COND`].
pub fn nonsym_geig(a: &DenseMatrix, m: &DenseMatrix) -> Result<GeigResult<Complex64>> {
    check_square_pair(a, m)?;
    let n = a.nrows();
    let b = m
        .clone()
        .lu()
        .solve(a)
        .ok_or_else(|| Error::InvalidInput("mass matrix is singular".into()))?;
    let schur = Schur::try_new(to_complex(&b), f64::EPSILON, 10_000)
        .ok_or_else(|| Error::InvalidInput("Schur iteration did not converge".into()))?;
    let (q, t) = schur.unpack();

    let tnorm = t.norm().max(f64::MIN_POSITIVE);
    let smin = f64::EPSILON * tnorm;
    let mut y = ComplexMatrix::zeros(n, n);
    for k in 0..n {
        let lam = t[(k, k)];
        y[(k, k)] = Complex64::new(1.0, 0.0);
        for i in (0..k).rev() {
            let mut s = Complex64::new(0.0, 0.0);
            for j in (i + 1)..=k {
                s += t[(i, j)] * y[(j, k)];
            }
            let mut d = t[(i, i)] - lam;
            if d.norm() < smin {
                d = Complex64::new(smin, 0.0);
            }
            y[(i, k)] = -s / d;
        }
    }
    let mut u = q * y;
    for mut col in u.column_iter_mut() {
        let nrm = col.norm();
        if nrm > 0.0 && nrm.is_finite() {
            col.unscale_mut(nrm);
        }
    }
    let vals: Vec<Complex64> = (0..n).map(|k| t[(k, k)]).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        vals[i]
            .re
            .total_cmp(&vals[j].re)
            .then(vals[i].im.total_cmp(&vals[j].im))
    });
    let vectors = ComplexMatrix::from_fn(n, n, |r, c| u[(r, order[c])]);
    let cond = cond2(&vectors);
    if !(cond <= DEFECTIVE_COND) {
        return Err(Error::DefectivePencil { cond });
    }
    Ok(GeigResult {
        vectors,
        values: order.iter().map(|&i| vals[i]).collect(),
        normalization: Normalization::UnitColumns,
    })
}

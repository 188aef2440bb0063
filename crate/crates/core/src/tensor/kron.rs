use nalgebra::{ComplexField, DMatrix};

use crate::error::{check_len, Error, Result};

/// Lazy Kronecker product `A_1 ⊗ A_2 ⊗ … ⊗ A_k` of its factors.
///
/// The last factor acts on the fastest-varying index of the input vector.
#[derive(Debug, Clone, PartialEq)]
pub struct KronOperator<T: ComplexField> {
    factors: Vec<DMatrix<T>>,
}

impl<T: ComplexField + Copy> KronOperator<T> {
    pub fn new(factors: Vec<DMatrix<T>>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidInput("Kronecker operator needs a factor".into()));
        }
        Ok(Self { factors })
    }

    pub fn factors(&self) -> &[DMatrix<T>] {
        &self.factors
    }

    pub fn nrows(&self) -> usize {
        self.factors.iter().map(|f| f.nrows()).product()
    }

    pub fn ncols(&self) -> usize {
        self.factors.iter().map(|f| f.ncols()).product()
    }

    pub fn matvec(&self, x: &[T]) -> Result<Vec<T>> {
        let refs: Vec<&DMatrix<T>> = self.factors.iter().collect();
        kron_matvec(&refs, x)
    }

    /// Explicit Kronecker matrix. Only meant for small test-sized operators.
    pub fn to_dense(&self) -> DMatrix<T> {
        self.factors[1..]
            .iter()
            .fold(self.factors[0].clone(), |acc, f| kron_dense(&acc, f))
    }
}

/// Dense Kronecker product `a ⊗ b`.
pub fn kron_dense<T: ComplexField + Copy>(a: &DMatrix<T>, b: &DMatrix<T>) -> DMatrix<T> {
    a.kronecker(b)
}

/// `(A_1 ⊗ … ⊗ A_k) x` by successive mode products, never forming the
/// Kronecker matrix. Costs `N * Σ n_l` multiply-adds for square factors.
pub fn kron_matvec<T: ComplexField + Copy>(factors: &[&DMatrix<T>], x: &[T]) -> Result<Vec<T>> {
    kron_matvec_counted(factors, x).map(|(y, _)| y)
}

pub(crate) fn kron_matvec_counted<T: ComplexField + Copy>(
    factors: &[&DMatrix<T>],
    x: &[T],
) -> Result<(Vec<T>, u64)> {
    let cols: usize = factors.iter().map(|f| f.ncols()).product();
    check_len(cols, x.len())?;
    let mut dims: Vec<usize> = factors.iter().map(|f| f.ncols()).collect();
    let mut cur = x.to_vec();
    let mut ops = 0u64;
    for k in (0..factors.len()).rev() {
        let a = factors[k];
        let outer: usize = dims[..k].iter().product();
        let inner: usize = dims[k + 1..].iter().product();
        let (rows, ncols) = (a.nrows(), a.ncols());
        let mut next = vec![T::zero(); outer * rows * inner];
        for o in 0..outer {
            let src = &cur[o * ncols * inner..(o + 1) * ncols * inner];
            let dst = &mut next[o * rows * inner..(o + 1) * rows * inner];
            for c in 0..ncols {
                let xs = &src[c * inner..(c + 1) * inner];
                for r in 0..rows {
                    let coef = a[(r, c)];
                    if coef == T::zero() {
                        continue;
                    }
                    let ys = &mut dst[r * inner..(r + 1) * inner];
                    for (y, &v) in ys.iter_mut().zip(xs) {
                        *y += coef * v;
                    }
                }
            }
        }
        ops += (outer * rows * ncols * inner) as u64;
        dims[k] = rows;
        cur = next;
    }
    Ok((cur, ops))
}

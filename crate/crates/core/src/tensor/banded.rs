use super::DenseMatrix;
use crate::error::{check_len, Error, Result};

/// Square matrix stored by diagonals.
///
/// Row `i` keeps the entries of columns `i - lower ..= i + upper` in a
/// contiguous slot of width `lower + upper + 1`. Slots that fall outside the
/// matrix stay zero.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedMatrix {
    n: usize,
    lower: usize,
    upper: usize,
    data: Vec<f64>,
}

impl BandedMatrix {
    pub fn zeros(n: usize, lower: usize, upper: usize) -> Self {
        let lower = lower.min(n.saturating_sub(1));
        let upper = upper.min(n.saturating_sub(1));
        Self {
            n,
            lower,
            upper,
            data: vec![0.0; n * (lower + upper + 1)],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, 0, 0);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    /// Copies the band of a dense matrix; entries outside the band are dropped.
    pub fn from_dense(d: &DenseMatrix, lower: usize, upper: usize) -> Self {
        assert!(d.is_square());
        let mut m = Self::zeros(d.nrows(), lower, upper);
        for i in 0..m.n {
            for j in m.row_range(i) {
                m.set(i, j, d[(i, j)]);
            }
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn lower_bw(&self) -> usize {
        self.lower
    }

    pub fn upper_bw(&self) -> usize {
        self.upper
    }

    /// Total number of stored diagonals.
    pub fn bandwidth(&self) -> usize {
        self.lower + self.upper + 1
    }

    fn width(&self) -> usize {
        self.lower + self.upper + 1
    }

    pub fn in_band(&self, i: usize, j: usize) -> bool {
        i < self.n && j < self.n && j + self.lower >= i && j <= i + self.upper
    }

    /// Column range of the band in row `i`.
    pub fn row_range(&self, i: usize) -> std::ops::Range<usize> {
        i.saturating_sub(self.lower)..(i + self.upper + 1).min(self.n)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if self.in_band(i, j) {
            self.data[i * self.width() + j + self.lower - i]
        } else {
            0.0
        }
    }

    /// Writes an entry inside the band.
    ///
    /// # Panics
    /// Panics if `(i, j)` lies outside the declared band.
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        assert!(self.in_band(i, j), "({i}, {j}) outside band");
        let w = self.width();
        self.data[i * w + j + self.lower - i] = v;
    }

    pub fn add_to(&mut self, i: usize, j: usize, v: f64) {
        let cur = self.get(i, j);
        self.set(i, j, cur + v);
    }

    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len(self.n, x.len())?;
        Ok((0..self.n)
            .map(|i| self.row_range(i).map(|j| self.get(i, j) * x[j]).sum())
            .collect())
    }

    /// `self + shift * other`, with the union of the two bands.
    pub fn add_scaled(&self, shift: f64, other: &BandedMatrix) -> Result<BandedMatrix> {
        check_len(self.n, other.n)?;
        let mut out = Self::zeros(
            self.n,
            self.lower.max(other.lower),
            self.upper.max(other.upper),
        );
        for i in 0..self.n {
            for j in out.row_range(i) {
                out.set(i, j, self.get(i, j) + shift * other.get(i, j));
            }
        }
        Ok(out)
    }

    pub fn transpose(&self) -> BandedMatrix {
        let mut t = Self::zeros(self.n, self.upper, self.lower);
        for i in 0..self.n {
            for j in self.row_range(i) {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut d = DenseMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            for j in self.row_range(i) {
                d[(i, j)] = self.get(i, j);
            }
        }
        d
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Raw band storage, row-major with `bandwidth()` slots per row.
    pub fn raw_band(&self) -> &[f64] {
        &self.data
    }
}

/// LU factors of a banded matrix computed without pivoting.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedLu {
    /// Unit lower triangular factor; the unit diagonal is stored explicitly.
    pub l: BandedMatrix,
    /// Upper triangular factor.
    pub u: BandedMatrix,
}

/// Doolittle LU without pivoting. The factors keep the bands of `m`.
///
/// Fails when a pivot falls below `1e-14 * max|m|`.
pub fn banded_lu_factor(m: &BandedMatrix) -> Result<BandedLu> {
    let n = m.n;
    let (kl, ku) = (m.lower, m.upper);
    let tol = 1e-14 * m.max_abs();
    let mut work = m.clone();
    let mut l = BandedMatrix::zeros(n, kl, 0);
    for k in 0..n {
        let pivot = work.get(k, k);
        if pivot.abs() <= tol || !pivot.is_finite() {
            return Err(Error::SingularPivot {
                index: k,
                value: pivot,
            });
        }
        l.set(k, k, 1.0);
        let row_end = (k + kl + 1).min(n);
        let col_end = (k + ku + 1).min(n);
        for i in (k + 1)..row_end {
            let factor = work.get(i, k) / pivot;
            l.set(i, k, factor);
            work.set(i, k, 0.0);
            for j in (k + 1)..col_end {
                let v = work.get(i, j) - factor * work.get(k, j);
                work.set(i, j, v);
            }
        }
    }
    let mut u = BandedMatrix::zeros(n, 0, ku);
    for i in 0..n {
        for j in u.row_range(i) {
            u.set(i, j, work.get(i, j));
        }
    }
    Ok(BandedLu { l, u })
}

impl BandedLu {
    pub fn n(&self) -> usize {
        self.u.n
    }

    /// Forward then backward substitution. Returns the number of
    /// multiply-adds performed alongside the solution.
    pub(crate) fn solve_in_place<T>(&self, x: &mut [T]) -> u64
    where
        T: Copy
            + std::ops::Sub<Output = T>
            + std::ops::Mul<f64, Output = T>
            + std::ops::Div<f64, Output = T>,
    {
        let n = self.n();
        let mut ops = 0u64;
        for i in 0..n {
            let mut acc = x[i];
            for j in self.l.row_range(i) {
                if j < i {
                    acc = acc - x[j] * self.l.get(i, j);
                    ops += 1;
                }
            }
            x[i] = acc;
        }
        for i in (0..n).rev() {
            let mut acc = x[i];
            for j in self.u.row_range(i) {
                if j > i {
                    acc = acc - x[j] * self.u.get(i, j);
                    ops += 1;
                }
            }
            x[i] = acc / self.u.get(i, i);
            ops += 1;
        }
        ops
    }
}

/// Solves `L U x = b` with the factors from [`banded_lu_factor`].
pub fn banded_lu_solve(lu: &BandedLu, b: &[f64]) -> Result<Vec<f64>> {
    check_len(lu.n(), b.len())?;
    let mut x = b.to_vec();
    lu.solve_in_place(&mut x);
    Ok(x)
}

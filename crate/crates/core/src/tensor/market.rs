use std::io::{self, Write};

use super::{BandedMatrix, CsrMatrix, DenseMatrix};

/// Matrices that can be dumped as Matrix Market coordinate files.
pub trait MatrixMarket {
    fn shape(&self) -> (usize, usize);
    /// Nonzero entries as zero-based `(row, col, value)`.
    fn entries(&self) -> Vec<(usize, usize, f64)>;
}

impl MatrixMarket for DenseMatrix {
    fn shape(&self) -> (usize, usize) {
        (self.nrows(), self.ncols())
    }

    fn entries(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::new();
        for j in 0..self.ncols() {
            for i in 0..self.nrows() {
                if self[(i, j)] != 0.0 {
                    out.push((i, j, self[(i, j)]));
                }
            }
        }
        out
    }
}

impl MatrixMarket for BandedMatrix {
    fn shape(&self) -> (usize, usize) {
        (self.n(), self.n())
    }

    fn entries(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::new();
        for i in 0..self.n() {
            for j in self.row_range(i) {
                let v = self.get(i, j);
                if v != 0.0 {
                    out.push((i, j, v));
                }
            }
        }
        out
    }
}

impl MatrixMarket for CsrMatrix {
    fn shape(&self) -> (usize, usize) {
        (self.nrows(), self.ncols())
    }

    fn entries(&self) -> Vec<(usize, usize, f64)> {
        (0..self.nrows())
            .flat_map(|i| self.row(i).map(move |(j, v)| (i, j, v)))
            .filter(|&(_, _, v)| v != 0.0)
            .collect()
    }
}

/// Writes `m` in Matrix Market coordinate format (one-based indices).
pub fn write_matrix_market<W: Write, M: MatrixMarket + ?Sized>(w: &mut W, m: &M) -> io::Result<()> {
    let (rows, cols) = m.shape();
    let entries = m.entries();
    writeln!(w, "%%MatrixMarket matrix coordinate real general")?;
    writeln!(w, "{rows} {cols} {}", entries.len())?;
    for (i, j, v) in entries {
        writeln!(w, "{} {} {:.17e}", i + 1, j + 1, v)?;
    }
    Ok(())
}

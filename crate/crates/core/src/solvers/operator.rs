use rayon::prelude::*;

use crate::eigen::{fast_diag_space, FactorKind, KronTerm, SpaceDiagonalization};
use crate::error::{check_len, Error, Result};
use crate::tensor::{kron_dense, kron_matvec, BandedMatrix, CsrMatrix, DenseMatrix};

/// A square linear map on real vectors.
pub trait LinearOperator: Sync {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64]) -> Result<Vec<f64>>;
}

/// The spatial stiffness and mass operators `A_s`, `M_s`.
#[derive(Debug, Clone)]
pub enum SpaceMatrices {
    /// Tensor-product space: `M_s = M_d ⊗ … ⊗ M_1` and `A_s = Σ terms`.
    /// `a[l]`, `m[l]` belong to direction `l + 1`.
    Kronecker {
        a: Vec<DenseMatrix>,
        m: Vec<DenseMatrix>,
        terms: Vec<KronTerm>,
    },
    /// Assembled sparse matrices of a mapped geometry.
    Mapped { a: CsrMatrix, m: CsrMatrix },
}

impl SpaceMatrices {
    /// Laplacian on a Cartesian product domain.
    pub fn laplacian(pairs: Vec<(DenseMatrix, DenseMatrix)>) -> Self {
        let d = pairs.len();
        let (a, m) = pairs.into_iter().unzip();
        SpaceMatrices::Kronecker { a, m, terms: KronTerm::laplacian(d) }
    }

    pub fn dim(&self) -> usize {
        match self {
            SpaceMatrices::Kronecker { m, .. } => m.iter().map(|f| f.nrows()).product(),
            SpaceMatrices::Mapped { m, .. } => m.nrows(),
        }
    }

    fn term_factors<'a>(a: &'a [DenseMatrix], m: &'a [DenseMatrix], kinds: &[FactorKind]) -> Vec<&'a DenseMatrix> {
        kinds
            .iter()
            .enumerate()
            .rev()
            .map(|(l, k)| match k {
                FactorKind::A => &a[l],
                FactorKind::M => &m[l],
            })
            .collect()
    }

    /// `A_s x`.
    pub fn apply_a(&self, x: &[f64]) -> Result<Vec<f64>> {
        match self {
            SpaceMatrices::Kronecker { a, m, terms } => {
                check_len(self.dim(), x.len())?;
                let mut out = vec![0.0; x.len()];
                for t in terms {
                    let y = kron_matvec(&Self::term_factors(a, m, &t.kinds), x)?;
                    out.iter_mut().zip(&y).for_each(|(o, v)| *o += t.coef * v);
                }
                Ok(out)
            }
            SpaceMatrices::Mapped { a, .. } => a.matvec(x),
        }
    }

    /// `M_s x`.
    pub fn apply_m(&self, x: &[f64]) -> Result<Vec<f64>> {
        match self {
            SpaceMatrices::Kronecker { m, .. } => kron_matvec(&m.iter().rev().collect::<Vec<_>>(), x),
            SpaceMatrices::Mapped { m, .. } => m.matvec(x),
        }
    }

    pub fn dense_a(&self) -> DenseMatrix {
        match self {
            SpaceMatrices::Kronecker { a, m, terms } => {
                let n = self.dim();
                let mut out = DenseMatrix::zeros(n, n);
                for t in terms {
                    let f = Self::term_factors(a, m, &t.kinds);
                    let k = f[1..].iter().fold(f[0].clone(), |acc, x| kron_dense(&acc, x));
                    out += k * t.coef;
                }
                out
            }
            SpaceMatrices::Mapped { a, .. } => a.to_dense(),
        }
    }

    pub fn dense_m(&self) -> DenseMatrix {
        match self {
            SpaceMatrices::Kronecker { m, .. } => {
                let f: Vec<&DenseMatrix> = m.iter().rev().collect();
                f[1..].iter().fold(f[0].clone(), |acc, x| kron_dense(&acc, x))
            }
            SpaceMatrices::Mapped { m, .. } => m.to_dense(),
        }
    }

    /// Fast diagonalization; only tensor-product spaces qualify.
    pub fn diagonalize(&self) -> Result<SpaceDiagonalization> {
        match self {
            SpaceMatrices::Kronecker { a, m, terms } => {
                let pairs: Vec<_> = a.iter().cloned().zip(m.iter().cloned()).collect();
                fast_diag_space(&pairs, terms)
            }
            SpaceMatrices::Mapped { .. } => Err(Error::InvalidInput(
                "mapped spatial matrices have no Kronecker structure to diagonalize".into(),
            )),
        }
    }
}

/// `A = A_t ⊗ M_s + M_t ⊗ A_s` applied without assembly.
#[derive(Debug, Clone)]
pub struct SpaceTimeOperator {
    a_t: BandedMatrix,
    m_t: BandedMatrix,
    space: SpaceMatrices,
}

impl SpaceTimeOperator {
    pub fn new(a_t: BandedMatrix, m_t: BandedMatrix, space: SpaceMatrices) -> Result<Self> {
        check_len(a_t.n(), m_t.n())?;
        Ok(Self { a_t, m_t, space })
    }

    pub fn a_t(&self) -> &BandedMatrix {
        &self.a_t
    }

    pub fn m_t(&self) -> &BandedMatrix {
        &self.m_t
    }

    pub fn space(&self) -> &SpaceMatrices {
        &self.space
    }

    pub fn n_t(&self) -> usize {
        self.a_t.n()
    }

    pub fn n_s(&self) -> usize {
        self.space.dim()
    }

    /// Explicit dense assembly; for oracles at small sizes only.
    pub fn to_dense(&self) -> DenseMatrix {
        kron_dense(&self.a_t.to_dense(), &self.space.dense_m()) + kron_dense(&self.m_t.to_dense(), &self.space.dense_a())
    }
}

impl LinearOperator for SpaceTimeOperator {
    fn dim(&self) -> usize {
        self.n_t() * self.n_s()
    }

    fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len(self.dim(), x.len())?;
        let ns = self.n_s();
        let slices: Vec<(Vec<f64>, Vec<f64>)> = x
            .par_chunks(ns)
            .map(|xs| Ok((self.space.apply_m(xs)?, self.space.apply_a(xs)?)))
            .collect::<Result<_>>()?;
        let mut out = vec![0.0; x.len()];
        let nt = self.n_t();
        let lower = self.a_t.lower_bw().max(self.m_t.lower_bw());
        let upper = self.a_t.upper_bw().max(self.m_t.upper_bw());
        out.par_chunks_mut(ns).enumerate().for_each(|(j, dst)| {
            for k in j.saturating_sub(lower)..(j + upper + 1).min(nt) {
                let (at, mt) = (self.a_t.get(j, k), self.m_t.get(j, k));
                let (pm, qa) = &slices[k];
                for i in 0..ns {
                    dst[i] += at * pm[i] + mt * qa[i];
                }
            }
        });
        Ok(out)
    }
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// `‖A u - f‖₂ / ‖f‖₂`, or the absolute residual when `f = 0`.
pub fn residual(op: &dyn LinearOperator, u: &[f64], f: &[f64]) -> Result<f64> {
    check_len(op.dim(), f.len())?;
    let au = op.apply(u)?;
    let r: Vec<f64> = au.iter().zip(f).map(|(a, b)| a - b).collect();
    let nf = norm2(f);
    Ok(if nf > 0.0 { norm2(&r) / nf } else { norm2(&r) })
}

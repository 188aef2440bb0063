use num_complex::Complex64;

use crate::eigen::skew_geig;
use crate::error::{check_len, Error, Result};
use crate::tensor::{to_complex, ComplexMatrix, DenseMatrix};

/// Which splitting `A_t = Ã_t + Fᵀ G` the low-rank method uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LowRank {
    /// `Fᵀ = α e_N`, `G = e_Nᵀ`.
    #[default]
    Rank1,
    /// `Fᵀ = [[a, 0], [α, 1]]`, `G = [[0ᵀ, 1], [-aᵀ, 0]]`.
    Rank2,
}

impl LowRank {
    pub fn rank(self) -> usize {
        match self {
            LowRank::Rank1 => 1,
            LowRank::Rank2 => 2,
        }
    }
}

/// Time factors of the low-rank method: `Ã_t U = M_t U Λ` with
/// `U^* M_t U = I`, plus the transformed update `U^* Fᵀ` and `G U`.
#[derive(Debug, Clone)]
pub struct LowRankFactors {
    kind: LowRank,
    lambda_t: Vec<Complex64>,
    u: ComplexMatrix,
    uf: ComplexMatrix,
    gu: ComplexMatrix,
    setup_ops: u64,
}

/// Data of one SMW block `D_λ + UF · GU` with `D_λ = diag(Λ_t) + λ`.
#[derive(Debug, Clone, Copy)]
pub struct SmwBlock<'a> {
    pub diag: &'a [Complex64],
    pub shift: f64,
    pub uf: &'a ComplexMatrix,
    pub gu: &'a ComplexMatrix,
    /// `C_λ = (I + GU D_λ⁻¹ UF)⁻¹`.
    pub capacitance: &'a ComplexMatrix,
}

fn split(a_t: &DenseMatrix, kind: LowRank) -> (DenseMatrix, DenseMatrix) {
    let n = a_t.nrows();
    let k = n - 1;
    let alpha = a_t[(k, k)];
    match kind {
        LowRank::Rank1 => {
            let mut ft = DenseMatrix::zeros(n, 1);
            ft[(k, 0)] = alpha;
            let mut g = DenseMatrix::zeros(1, n);
            g[(0, k)] = 1.0;
            (ft, g)
        }
        LowRank::Rank2 => {
            let mut ft = DenseMatrix::zeros(n, 2);
            let mut g = DenseMatrix::zeros(2, n);
            for i in 0..k {
                ft[(i, 0)] = a_t[(i, k)];
                g[(1, i)] = -a_t[(i, k)];
            }
            ft[(k, 0)] = alpha;
            ft[(k, 1)] = 1.0;
            g[(0, k)] = 1.0;
            (ft, g)
        }
    }
}

impl LowRankFactors {
    pub fn build(a_t: &DenseMatrix, m_t: &DenseMatrix, kind: LowRank) -> Result<Self> {
        let n = a_t.nrows();
        if n == 0 || !a_t.is_square() {
            return Err(Error::InvalidInput("time matrix must be square and nonempty".into()));
        }
        check_len(n, m_t.nrows())?;
        let (ft, g) = split(a_t, kind);
        let a_tilde = a_t - &ft * &g;
        let eig = skew_geig(&a_tilde, m_t)?;
        let uf = eig.vectors.adjoint() * to_complex(&ft);
        let gu = to_complex(&g) * &eig.vectors;
        let r = kind.rank() as u64;
        let n64 = n as u64;
        Ok(Self {
            kind,
            lambda_t: eig.values,
            u: eig.vectors,
            uf,
            gu,
            setup_ops: n64.pow(3) + 2 * r * n64 * n64,
        })
    }

    pub fn kind(&self) -> LowRank {
        self.kind
    }

    pub fn rank(&self) -> usize {
        self.kind.rank()
    }

    pub fn n(&self) -> usize {
        self.lambda_t.len()
    }

    /// Eigenvalues of `(Ã_t, M_t)`, purely imaginary.
    pub fn lambda_t(&self) -> &[Complex64] {
        &self.lambda_t
    }

    pub fn u(&self) -> &ComplexMatrix {
        &self.u
    }

    pub fn uf(&self) -> &ComplexMatrix {
        &self.uf
    }

    pub fn gu(&self) -> &ComplexMatrix {
        &self.gu
    }

    pub fn setup_ops(&self) -> u64 {
        self.setup_ops
    }

    /// `C_λ` for the shift `λ`.
    pub fn capacitance(&self, shift: f64, index: usize) -> Result<ComplexMatrix> {
        smw_capacitance(&self.lambda_t, shift, &self.uf, &self.gu, index)
    }

    /// Dense `Λ_t + λ I + U^* Fᵀ G U`, for verification.
    pub fn dense_block(&self, shift: f64) -> ComplexMatrix {
        let mut d = &self.uf * &self.gu;
        for (j, l) in self.lambda_t.iter().enumerate() {
            d[(j, j)] += l + shift;
        }
        d
    }
}

fn shifted_pivots(diag: &[Complex64], shift: f64, index: usize) -> Result<Vec<Complex64>> {
    diag.iter()
        .map(|d| {
            let p = d + shift;
            if p.norm() < 1e-14 {
                Err(Error::SingularBlock { block: index, detail: format!("diagonal entry {p}") })
            } else {
                Ok(p)
            }
        })
        .collect()
}

/// `C_λ = (I_r + GU D_λ⁻¹ UF)⁻¹`.
pub fn smw_capacitance(
    diag: &[Complex64],
    shift: f64,
    uf: &ComplexMatrix,
    gu: &ComplexMatrix,
    index: usize,
) -> Result<ComplexMatrix> {
    check_len(diag.len(), uf.nrows())?;
    check_len(diag.len(), gu.ncols())?;
    let piv = shifted_pivots(diag, shift, index)?;
    let r = uf.ncols();
    let mut scaled = uf.clone();
    for (i, p) in piv.iter().enumerate() {
        for c in 0..r {
            scaled[(i, c)] /= p;
        }
    }
    let k = ComplexMatrix::identity(r, r) + gu * scaled;
    k.try_inverse().ok_or_else(|| Error::SingularBlock {
        block: index,
        detail: "capacitance matrix is singular".into(),
    })
}

impl SmwBlock<'_> {
    /// Algorithm: `v1 = D⁻¹y`, `v2 = GU v1`, `v3 = C v2`, `v4 = UF v3`,
    /// `v5 = D⁻¹ v4`, `x = v1 - v5`. Returns the operation count.
    pub(crate) fn solve_in_place(&self, y: &mut [Complex64]) -> u64 {
        let n = self.diag.len();
        let r = self.uf.ncols();
        for (v, d) in y.iter_mut().zip(self.diag) {
            *v /= d + self.shift;
        }
        let mut v2 = vec![Complex64::new(0.0, 0.0); r];
        for (a, v2a) in v2.iter_mut().enumerate() {
            for j in 0..n {
                *v2a += self.gu[(a, j)] * y[j];
            }
        }
        let mut v3 = vec![Complex64::new(0.0, 0.0); r];
        for (a, v3a) in v3.iter_mut().enumerate() {
            for b in 0..r {
                *v3a += self.capacitance[(a, b)] * v2[b];
            }
        }
        for (j, v) in y.iter_mut().enumerate() {
            let mut v4 = Complex64::new(0.0, 0.0);
            for b in 0..r {
                v4 += self.uf[(j, b)] * v3[b];
            }
            *v -= v4 / (self.diag[j] + self.shift);
        }
        let (n, r) = (n as u64, r as u64);
        n + r * n + r * r + r * n + n + n
    }
}

/// `(D_λ + UF · GU)⁻¹ y` by the Sherman-Morrison-Woodbury identity.
pub fn smw_block_solve(block: &SmwBlock<'_>, y: &[Complex64]) -> Result<Vec<Complex64>> {
    check_len(block.diag.len(), y.len())?;
    shifted_pivots(block.diag, block.shift, 0)?;
    let mut x = y.to_vec();
    block.solve_in_place(&mut x);
    Ok(x)
}

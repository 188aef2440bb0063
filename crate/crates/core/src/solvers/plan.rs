use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;

use super::arrowhead::ArrowheadFactors;
use super::lowrank::{LowRank, LowRankFactors, SmwBlock};
use super::operator::LinearOperator;
use crate::eigen::{nonsym_geig, SpaceDiagonalization};
use crate::error::{check_len, Error, Result};
use crate::tensor::{kron_matvec_counted, banded_lu_factor, BandedLu, BandedMatrix, ComplexMatrix, DenseMatrix, ShufflePermutation};

/// The four factorizations of the time part.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    /// Diagonalization in time.
    Dt,
    /// Banded LU per block.
    Lu,
    /// Arrowhead factorization.
    Ar,
    /// Low-rank modification with Sherman-Morrison-Woodbury.
    Lr,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Dt, Method::Lu, Method::Ar, Method::Lr];

    pub fn name(self) -> &'static str {
        match self {
            Method::Dt => "dt",
            Method::Lu => "lu",
            Method::Ar => "ar",
            Method::Lr => "lr",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "dt" => Ok(Method::Dt),
            "lu" => Ok(Method::Lu),
            "ar" => Ok(Method::Ar),
            "lr" => Ok(Method::Lr),
            other => Err(Error::InvalidInput(format!("unknown method `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PlanOptions {
    pub low_rank: LowRank,
}

/// Nominal operation counts of the setup phase. Dense cubic kernels are
/// charged `n³` each; banded and per-block loops are counted exactly.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SetupOps {
    pub space: u64,
    pub time: u64,
    pub blocks: u64,
}

impl SetupOps {
    pub fn total(&self) -> u64 {
        self.space + self.time + self.blocks
    }
}

/// Operation counts of one application.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ApplyOps {
    /// Multiply-adds in the four basis changes.
    pub transform: u64,
    /// Work in the `N_s` independent block solves.
    pub block: u64,
}

#[derive(Debug, Clone)]
enum TimeFactors {
    Dt {
        u: ComplexMatrix,
        u_tilde: ComplexMatrix,
        lambda: Vec<Complex64>,
    },
    Lu {
        blocks: Vec<BandedLu>,
    },
    Ar {
        factors: ArrowheadFactors,
        s: Vec<Complex64>,
    },
    Lr {
        factors: LowRankFactors,
        caps: Vec<ComplexMatrix>,
    },
}

/// Precomputed factors for `A = A_t ⊗ M_s + M_t ⊗ A_s`. Immutable and
/// shareable; [`SolverPlan::apply`] is reentrant.
#[derive(Debug, Clone)]
pub struct SolverPlan {
    method: Method,
    space: SpaceDiagonalization,
    time: TimeFactors,
    n_t: usize,
    setup_ops: SetupOps,
}

/// Builds the plan for `method`.
pub fn plan(
    method: Method,
    a_t: &BandedMatrix,
    m_t: &BandedMatrix,
    space: SpaceDiagonalization,
    options: &PlanOptions,
) -> Result<SolverPlan> {
    let n = a_t.n();
    check_len(n, m_t.n())?;
    if n == 0 || space.dim() == 0 {
        return Err(Error::InvalidInput("empty space-time system".into()));
    }
    let n64 = n as u64;
    let lambdas = space.lambda();
    let mut ops = SetupOps { space: space.setup_ops(), ..Default::default() };
    let time = match method {
        Method::Dt => {
            let (a, m) = (a_t.to_dense(), m_t.to_dense());
            let geig = nonsym_geig(&a, &m)?;
            let mu = crate::tensor::to_complex(&m) * &geig.vectors;
            let u_tilde = mu.try_inverse().ok_or(Error::DefectivePencil { cond: f64::INFINITY })?;
            ops.time = 2 * n64.pow(3);
            TimeFactors::Dt { u: geig.vectors, u_tilde, lambda: geig.values }
        }
        Method::Lu => {
            let blocks = lambdas
                .par_iter()
                .map(|&l| banded_lu_factor(&a_t.add_scaled(l, m_t)?))
                .collect::<Result<Vec<_>>>()?;
            let (kl, ku) = (
                a_t.lower_bw().max(m_t.lower_bw()) as u64,
                a_t.upper_bw().max(m_t.upper_bw()) as u64,
            );
            ops.blocks = lambdas.len() as u64 * n64 * kl * (ku + 1);
            TimeFactors::Lu { blocks }
        }
        Method::Ar => {
            let factors = ArrowheadFactors::build(&a_t.to_dense(), &m_t.to_dense())?;
            let s = lambdas
                .iter()
                .enumerate()
                .map(|(i, &l)| factors.block(l, i).map(|b| b.s_lambda))
                .collect::<Result<Vec<_>>>()?;
            ops.time = factors.setup_ops();
            ops.blocks = lambdas.len() as u64 * 2 * n64;
            TimeFactors::Ar { factors, s }
        }
        Method::Lr => {
            let factors = LowRankFactors::build(&a_t.to_dense(), &m_t.to_dense(), options.low_rank)?;
            let caps = lambdas
                .par_iter()
                .enumerate()
                .map(|(i, &l)| factors.capacitance(l, i))
                .collect::<Result<Vec<_>>>()?;
            let r = factors.rank() as u64;
            ops.time = factors.setup_ops();
            ops.blocks = lambdas.len() as u64 * (r * r * n64 + r * n64 + r.pow(3));
            TimeFactors::Lr { factors, caps }
        }
    };
    Ok(SolverPlan { method, space, time, n_t: n, setup_ops: ops })
}

/// `(I ⊗ F) x` where `F` is the Kronecker product of `factors`.
fn space_transform(factors: &[&DenseMatrix], x: &[f64], n_s: usize) -> Result<(Vec<f64>, u64)> {
    let parts = x
        .par_chunks(n_s)
        .map(|xs| kron_matvec_counted(factors, xs))
        .collect::<Result<Vec<_>>>()?;
    let ops = parts.iter().map(|p| p.1).sum();
    Ok((parts.into_iter().flat_map(|p| p.0).collect(), ops))
}

/// `Y = X Bᵀ` on the `n_s x n_t` matricization, i.e. `(B ⊗ I) x`.
fn time_transform(b: &ComplexMatrix, x: &[Complex64], n_s: usize) -> (Vec<Complex64>, u64) {
    let n_t = b.nrows();
    let xm = ComplexMatrix::from_column_slice(n_s, n_t, x);
    let y = xm * b.transpose();
    (y.as_slice().to_vec(), (n_s * n_t * n_t) as u64)
}

impl SolverPlan {
    pub fn method(&self) -> Method {
        self.method
    }

    pub fn n_t(&self) -> usize {
        self.n_t
    }

    pub fn n_s(&self) -> usize {
        self.space.dim()
    }

    pub fn space(&self) -> &SpaceDiagonalization {
        &self.space
    }

    pub fn setup_ops(&self) -> SetupOps {
        self.setup_ops
    }

    /// The time basis `U_t`: the identity for LU.
    pub fn time_basis(&self) -> ComplexMatrix {
        match &self.time {
            TimeFactors::Dt { u, .. } => u.clone(),
            TimeFactors::Lu { .. } => ComplexMatrix::identity(self.n_t, self.n_t),
            TimeFactors::Ar { factors, .. } => factors.u().clone(),
            TimeFactors::Lr { factors, .. } => factors.u().clone(),
        }
    }

    pub fn arrowhead(&self) -> Option<&ArrowheadFactors> {
        match &self.time {
            TimeFactors::Ar { factors, .. } => Some(factors),
            _ => None,
        }
    }

    pub fn low_rank(&self) -> Option<&LowRankFactors> {
        match &self.time {
            TimeFactors::Lr { factors, .. } => Some(factors),
            _ => None,
        }
    }

    /// Banded LU factors of `A_t + λ_i M_t`, LU plans only.
    pub fn lu_blocks(&self) -> Option<&[BandedLu]> {
        match &self.time {
            TimeFactors::Lu { blocks } => Some(blocks),
            _ => None,
        }
    }

    /// Mutable access for fault injection in verification suites.
    pub fn lu_blocks_mut(&mut self) -> Option<&mut [BandedLu]> {
        match &mut self.time {
            TimeFactors::Lu { blocks } => Some(blocks),
            _ => None,
        }
    }

    /// Solves `A u = f`.
    pub fn apply(&self, f: &[f64]) -> Result<Vec<f64>> {
        self.apply_instrumented(f).map(|(u, _)| u)
    }

    /// Solves `A u = f` and reports operation counts.
    pub fn apply_instrumented(&self, f: &[f64]) -> Result<(Vec<f64>, ApplyOps)> {
        let (n_t, n_s) = (self.n_t, self.n_s());
        check_len(n_t * n_s, f.len())?;
        let shuffle = ShufflePermutation::new(n_t, n_s);
        let ut = self.space.transposed_factors();
        let ut_refs: Vec<&DenseMatrix> = ut.iter().collect();
        let u_refs = self.space.factors();
        let lambdas = self.space.lambda();
        let mut ops = ApplyOps::default();

        let (g, t_ops) = space_transform(&ut_refs, f, n_s)?;
        ops.transform += t_ops;

        if let TimeFactors::Lu { blocks } = &self.time {
            let mut z = shuffle.apply(&g, false)?;
            ops.block = z
                .par_chunks_mut(n_t)
                .zip(blocks.par_iter())
                .map(|(zb, lu)| lu.solve_in_place(zb))
                .sum();
            let w = shuffle.apply(&z, true)?;
            let (u, t_ops) = space_transform(&u_refs, &w, n_s)?;
            ops.transform += t_ops;
            return Ok((u, ops));
        }

        let gc: Vec<Complex64> = g.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        let (left, right) = match &self.time {
            TimeFactors::Dt { u, u_tilde, .. } => (u_tilde.clone(), u.clone()),
            TimeFactors::Ar { factors, .. } => (factors.u().adjoint(), factors.u().clone()),
            TimeFactors::Lr { factors, .. } => (factors.u().adjoint(), factors.u().clone()),
            TimeFactors::Lu { .. } => unreachable!("handled above"),
        };
        let (y, t_ops) = time_transform(&left, &gc, n_s);
        ops.transform += t_ops;
        let mut z = shuffle.apply(&y, false)?;

        let block_ops: Vec<u64> = z
            .par_chunks_mut(n_t)
            .enumerate()
            .map(|(i, zb)| self.solve_block(i, lambdas[i], zb))
            .collect::<Result<_>>()?;
        ops.block = block_ops.iter().sum();

        let w = shuffle.apply(&z, true)?;
        let (w, t_ops) = time_transform(&right, &w, n_s);
        ops.transform += t_ops;
        let re: Vec<f64> = w.iter().map(|c| c.re).collect();
        let im: Vec<f64> = w.iter().map(|c| c.im).collect();
        let (u, t1) = space_transform(&u_refs, &re, n_s)?;
        let (ui, t2) = space_transform(&u_refs, &im, n_s)?;
        ops.transform += t1 + t2;
        let nu = u.iter().map(|v| v * v).sum::<f64>().sqrt();
        let ni = ui.iter().map(|v| v * v).sum::<f64>().sqrt();
        if ni > 1e-8 * nu {
            return Err(Error::ImaginaryResidue { ratio: if nu > 0.0 { ni / nu } else { f64::INFINITY } });
        }
        Ok((u, ops))
    }

    fn solve_block(&self, i: usize, lambda_s: f64, zb: &mut [Complex64]) -> Result<u64> {
        match &self.time {
            TimeFactors::Dt { lambda, .. } => {
                for (z, lt) in zb.iter_mut().zip(lambda) {
                    let d = lt + lambda_s;
                    if d.norm() < 1e-14 * (lt.norm() + lambda_s.abs()) {
                        return Err(Error::SingularBlock {
                            block: i,
                            detail: format!("eigenvalue collision {lt} + {lambda_s}"),
                        });
                    }
                    *z /= d;
                }
                Ok(zb.len() as u64)
            }
            TimeFactors::Ar { factors, s } => {
                let block = super::ArrowheadBlock { factors, lambda: lambda_s, s_lambda: s[i] };
                Ok(block.solve_in_place(zb))
            }
            TimeFactors::Lr { factors, caps } => {
                let block = SmwBlock {
                    diag: factors.lambda_t(),
                    shift: lambda_s,
                    uf: factors.uf(),
                    gu: factors.gu(),
                    capacitance: &caps[i],
                };
                Ok(block.solve_in_place(zb))
            }
            TimeFactors::Lu { .. } => unreachable!("LU blocks are real"),
        }
    }
}

/// A plan acts as the inverse of its operator.
impl LinearOperator for SolverPlan {
    fn dim(&self) -> usize {
        self.n_t * self.n_s()
    }

    fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        SolverPlan::apply(self, x)
    }
}

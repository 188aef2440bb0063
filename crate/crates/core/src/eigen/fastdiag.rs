use rayon::prelude::*;

use super::{sym_pd_geig, GeigResult};
use crate::error::{Error, Result};
use crate::tensor::{kron_matvec, DenseMatrix};

/// Which directional matrix a Kronecker factor uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FactorKind {
    A,
    M,
}

/// `coef * K_d ⊗ … ⊗ K_1`; `kinds[l]` selects the factor for direction `l + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct KronTerm {
    pub coef: f64,
    pub kinds: Vec<FactorKind>,
}

impl KronTerm {
    /// The `d` terms of the Laplacian `Σ_l M ⊗ … ⊗ A_l ⊗ … ⊗ M`.
    pub fn laplacian(d: usize) -> Vec<KronTerm> {
        (0..d)
            .map(|l| KronTerm {
                coef: 1.0,
                kinds: (0..d).map(|k| if k == l { FactorKind::A } else { FactorKind::M }).collect(),
            })
            .collect()
    }

    /// The single term `M_d ⊗ … ⊗ M_1`.
    pub fn mass(d: usize) -> KronTerm {
        KronTerm { coef: 1.0, kinds: vec![FactorKind::M; d] }
    }
}

/// `U_s^T A_s U_s = diag(lambda)` and `U_s^T M_s U_s = I` with
/// `U_s = U_d ⊗ … ⊗ U_1`. Entry `i_1 + N_1 (i_2 + N_2 i_3 …)` of `lambda`
/// belongs to the tensor index `(i_1, …, i_d)`.
#[derive(Debug, Clone)]
pub struct SpaceDiagonalization {
    directional: Vec<GeigResult<f64>>,
    lambda: Vec<f64>,
    sizes: Vec<usize>,
}

impl SpaceDiagonalization {
    /// Builds the space part from directional decompositions that are already
    /// `M`-orthonormal.
    pub fn from_directional(directional: Vec<GeigResult<f64>>, terms: &[KronTerm]) -> Result<Self> {
        let d = directional.len();
        if d == 0 {
            return Err(Error::InvalidInput("at least one space direction required".into()));
        }
        if terms.is_empty() || terms.iter().any(|t| t.kinds.len() != d) {
            return Err(Error::InvalidInput(format!("every term needs exactly {d} factor kinds")));
        }
        let sizes: Vec<usize> = directional.iter().map(|g| g.values.len()).collect();
        let n: usize = sizes.iter().product();
        let mut lambda = vec![0.0; n];
        let mut idx = vec![0usize; d];
        for entry in lambda.iter_mut() {
            *entry = terms
                .iter()
                .map(|t| {
                    t.kinds.iter().enumerate().fold(t.coef, |acc, (l, kind)| match kind {
                        FactorKind::A => acc * directional[l].values[idx[l]],
                        FactorKind::M => acc,
                    })
                })
                .sum();
            for l in 0..d {
                idx[l] += 1;
                if idx[l] < sizes[l] {
                    break;
                }
                idx[l] = 0;
            }
        }
        Ok(Self { directional, lambda, sizes })
    }

    pub fn dim(&self) -> usize {
        self.lambda.len()
    }

    pub fn n_dirs(&self) -> usize {
        self.sizes.len()
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    pub fn directional(&self) -> &[GeigResult<f64>] {
        &self.directional
    }

    /// `[U_d, …, U_1]`, the order expected by [`kron_matvec`].
    pub fn factors(&self) -> Vec<&DenseMatrix> {
        self.directional.iter().rev().map(|g| &g.vectors).collect()
    }

    /// `[U_d^T, …, U_1^T]`.
    pub fn transposed_factors(&self) -> Vec<DenseMatrix> {
        self.directional.iter().rev().map(|g| g.vectors.transpose()).collect()
    }

    /// `U_s x`.
    pub fn apply_u(&self, x: &[f64]) -> Result<Vec<f64>> {
        kron_matvec(&self.factors(), x)
    }

    /// `U_s^T x`.
    pub fn apply_ut(&self, x: &[f64]) -> Result<Vec<f64>> {
        let t = self.transposed_factors();
        kron_matvec(&t.iter().collect::<Vec<_>>(), x)
    }

    /// Operation count of the dense directional eigensolves, `Σ N_l^3`.
    pub fn setup_ops(&self) -> u64 {
        self.sizes.iter().map(|&n| (n as u64).pow(3)).sum()
    }
}

/// Fast diagonalization of `Σ_j c_j K_{j,d} ⊗ … ⊗ K_{j,1}` against
/// `M_d ⊗ … ⊗ M_1`. `pairs[l]` is `(A_l, M_l)` for direction `l + 1`.
pub fn fast_diag_space(pairs: &[(DenseMatrix, DenseMatrix)], terms: &[KronTerm]) -> Result<SpaceDiagonalization> {
    let directional = pairs
        .par_iter()
        .map(|(a, m)| sym_pd_geig(a, m))
        .collect::<Result<Vec<_>>>()?;
    SpaceDiagonalization::from_directional(directional, terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spline::{assemble_1d, Constraint, MatrixKind, SplineSpace};
    use crate::tensor::kron_dense;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn pair(p: usize, n: usize) -> (DenseMatrix, DenseMatrix) {
        let s = SplineSpace::with_dofs(p, n, 0.0, 1.0, Constraint::ZeroAtBothEnds).unwrap();
        (
            assemble_1d(&s, MatrixKind::Stiffness).to_dense(),
            assemble_1d(&s, MatrixKind::Mass).to_dense(),
        )
    }

    #[test]
    fn one_direction_reduces_to_pencil() {
        let (a, m) = pair(2, 7);
        let fd = fast_diag_space(&[(a.clone(), m.clone())], &KronTerm::laplacian(1)).unwrap();
        let direct = sym_pd_geig(&a, &m).unwrap();
        assert_eq!(fd.lambda(), &direct.values[..]);
    }

    #[test]
    fn two_directions_match_dense_pencil() {
        let (a1, m1) = pair(1, 4);
        let (a2, m2) = pair(2, 5);
        let fd = fast_diag_space(&[(a1.clone(), m1.clone()), (a2.clone(), m2.clone())], &KronTerm::laplacian(2)).unwrap();
        let a = kron_dense(&a2, &m1) + kron_dense(&m2, &a1);
        let m = kron_dense(&m2, &m1);
        let dense = sym_pd_geig(&a, &m).unwrap();
        let mut ours = fd.lambda().to_vec();
        ours.sort_by(f64::total_cmp);
        for (x, y) in ours.iter().zip(&dense.values) {
            assert!((x - y).abs() <= 1e-9 * y.abs());
        }
        assert!(ours.iter().all(|&v| v > 0.0));
        let l1 = &fd.directional()[0].values;
        let l2 = &fd.directional()[1].values;
        assert!((fd.lambda()[1 + 4 * 3] - (l1[1] + l2[3])).abs() < 1e-12);
    }

    #[test]
    fn three_directions_m_orthonormal_by_probes() {
        let pairs = vec![pair(1, 4), pair(2, 4), pair(3, 4)];
        let fd = fast_diag_space(&pairs, &KronTerm::laplacian(3)).unwrap();
        let ms: Vec<&DenseMatrix> = pairs.iter().rev().map(|p| &p.1).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let x: Vec<f64> = (0..64).map(|_| rng.random_range(-1.0..1.0)).collect();
            let y = fd.apply_ut(&kron_matvec(&ms, &fd.apply_u(&x).unwrap()).unwrap()).unwrap();
            let err: f64 = x.iter().zip(&y).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            let nrm: f64 = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            assert!(err <= 1e-10 * nrm);
        }
    }

    #[test]
    fn weighted_terms() {
        let (a, m) = pair(1, 3);
        let terms = vec![
            KronTerm { coef: 2.0, kinds: vec![FactorKind::A] },
            KronTerm { coef: 3.0, kinds: vec![FactorKind::M] },
        ];
        let fd = fast_diag_space(&[(a.clone(), m.clone())], &terms).unwrap();
        let base = sym_pd_geig(&a, &m).unwrap();
        for (x, y) in fd.lambda().iter().zip(&base.values) {
            assert!((x - (2.0 * y + 3.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn term_arity_checked() {
        let (a, m) = pair(1, 3);
        assert!(fast_diag_space(&[(a, m)], &KronTerm::laplacian(2)).is_err());
    }
}

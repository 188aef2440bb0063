use nalgebra::DVector;
use num_complex::Complex64;

use crate::eigen::skew_geig;
use crate::error::{check_len, Error, Result};
use crate::tensor::{to_complex, ComplexMatrix, DenseMatrix};

/// Time factors of the arrowhead method.
///
/// `U_t^* M_t U_t = I` and `U_t^* A_t U_t = Δ_t` where `Δ_t` has the
/// diagonal `(deltas, sigma)`, last column `g` and last row `-g^*`.
#[derive(Debug, Clone)]
pub struct ArrowheadFactors {
    deltas: Vec<Complex64>,
    g: Vec<Complex64>,
    sigma: Complex64,
    u: ComplexMatrix,
    rho: f64,
    setup_ops: u64,
}

/// One shifted block `Δ_t + λ I` with its Schur scalar `s(λ)`.
#[derive(Debug, Clone, Copy)]
pub struct ArrowheadBlock<'a> {
    pub factors: &'a ArrowheadFactors,
    pub lambda: f64,
    pub s_lambda: Complex64,
}

fn max_abs(m: &DenseMatrix) -> f64 {
    m.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
}

impl ArrowheadFactors {
    /// Splits `A_t = [[Å, a], [-aᵀ, α]]`, `M_t = [[M̊, m], [mᵀ, μ]]` and builds
    /// `U_t = [[Ů, -ρ w], [0, ρ]]` with `w = M̊⁻¹ m`, `ρ = (μ - mᵀ w)^{-1/2}`.
    pub fn build(a_t: &DenseMatrix, m_t: &DenseMatrix) -> Result<Self> {
        let n = a_t.nrows();
        if n == 0 || !a_t.is_square() {
            return Err(Error::InvalidInput("time matrix must be square and nonempty".into()));
        }
        check_len(n, m_t.nrows())?;
        check_len(n, m_t.ncols())?;
        let k = n - 1;
        let alpha = a_t[(k, k)];
        if !(alpha > 0.0) {
            return Err(Error::ArrowheadPositivity { quantity: "alpha", value: alpha });
        }
        let a_vec = a_t.view((0, k), (k, 1)).column(0).into_owned();
        let tail_defect = (0..k).fold(0.0_f64, |acc, j| acc.max((a_t[(k, j)] + a_vec[j]).abs()));
        if tail_defect > 1e-12 * max_abs(a_t) {
            return Err(Error::NotSkewSymmetric { defect: tail_defect });
        }
        let a_ring = a_t.view((0, 0), (k, k)).into_owned();
        let m_ring = m_t.view((0, 0), (k, k)).into_owned();
        let m_vec = m_t.view((0, k), (k, 1)).column(0).into_owned();
        let mu = m_t[(k, k)];

        let w = if k == 0 {
            DVector::zeros(0)
        } else {
            m_ring.clone().cholesky().ok_or(Error::NotPositiveDefinite)?.solve(&m_vec)
        };
        let schur = mu - m_vec.dot(&w);
        if !(schur > 0.0) {
            return Err(Error::ArrowheadPositivity { quantity: "mu - m^T M^-1 m", value: schur });
        }
        let rho = schur.powf(-0.5);

        let (u_ring, deltas) = if k == 0 {
            (ComplexMatrix::zeros(0, 0), Vec::new())
        } else {
            let eig = skew_geig(&a_ring, &m_ring)?;
            (eig.vectors, eig.values)
        };
        let rhs = (&a_vec - &a_ring * &w) * rho;
        let g: Vec<Complex64> = (u_ring.adjoint() * to_complex(&DenseMatrix::from_column_slice(k, 1, rhs.as_slice())))
            .iter()
            .copied()
            .collect();
        let sigma = Complex64::new(rho * rho * alpha, 0.0);

        let mut u = ComplexMatrix::zeros(n, n);
        u.view_mut((0, 0), (k, k)).copy_from(&u_ring);
        for i in 0..k {
            u[(i, k)] = Complex64::new(-rho * w[i], 0.0);
        }
        u[(k, k)] = Complex64::new(rho, 0.0);

        let factors = Self { deltas, g, sigma, u, rho, setup_ops: 3 * (n as u64).pow(3) };
        factors.verify(a_t)?;
        Ok(factors)
    }

    /// Compares `U_t^* A_t U_t` against the stored arrowhead entries.
    fn verify(&self, a_t: &DenseMatrix) -> Result<()> {
        let delta = self.u.adjoint() * to_complex(a_t) * &self.u;
        let scale = delta.norm().max(f64::MIN_POSITIVE);
        let defect = (&delta - self.dense()).norm() / scale;
        if defect > 1e-10 {
            return Err(Error::NotArrowhead { defect });
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.deltas.len() + 1
    }

    pub fn deltas(&self) -> &[Complex64] {
        &self.deltas
    }

    pub fn g(&self) -> &[Complex64] {
        &self.g
    }

    pub fn sigma(&self) -> Complex64 {
        self.sigma
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// `U_t`, which is `M_t`-orthonormal.
    pub fn u(&self) -> &ComplexMatrix {
        &self.u
    }

    /// Nominal cost of the dense setup kernels.
    pub fn setup_ops(&self) -> u64 {
        self.setup_ops
    }

    /// `Δ_t` as a dense matrix.
    pub fn dense(&self) -> ComplexMatrix {
        let n = self.n();
        let k = n - 1;
        let mut d = ComplexMatrix::zeros(n, n);
        for j in 0..k {
            d[(j, j)] = self.deltas[j];
            d[(j, k)] = self.g[j];
            d[(k, j)] = -self.g[j].conj();
        }
        d[(k, k)] = self.sigma;
        d
    }

    /// Computes `s(λ) = σ + λ + Σ |g_j|² / (δ_j + λ)`.
    pub fn block(&self, lambda: f64, index: usize) -> Result<ArrowheadBlock<'_>> {
        let mut s = self.sigma + lambda;
        for (d, g) in self.deltas.iter().zip(&self.g) {
            let piv = d + lambda;
            if piv.norm() <= 1e-14 {
                return Err(Error::SingularBlock { block: index, detail: format!("delta + lambda = {piv}") });
            }
            s += g.norm_sqr() / piv;
        }
        if s.norm() <= 1e-14 * (self.sigma.norm() + lambda.abs()) {
            return Err(Error::SingularBlock { block: index, detail: format!("Schur scalar s = {s}") });
        }
        Ok(ArrowheadBlock { factors: self, lambda, s_lambda: s })
    }
}

impl ArrowheadBlock<'_> {
    /// The unit lower factor and the arrow upper factor whose product is
    /// `Δ_t + λ I`.
    pub fn dense_factors(&self) -> (ComplexMatrix, ComplexMatrix) {
        let f = self.factors;
        let n = f.n();
        let k = n - 1;
        let mut lower = ComplexMatrix::identity(n, n);
        let mut upper = ComplexMatrix::zeros(n, n);
        for j in 0..k {
            let piv = f.deltas[j] + self.lambda;
            lower[(k, j)] = -f.g[j].conj() / piv;
            upper[(j, j)] = piv;
            upper[(j, k)] = f.g[j];
        }
        upper[(k, k)] = self.s_lambda;
        (lower, upper)
    }

    /// Solves `(Δ_t + λ I) x = y` in place and returns the operation count.
    pub(crate) fn solve_in_place(&self, y: &mut [Complex64]) -> u64 {
        let f = self.factors;
        let k = f.deltas.len();
        let mut last = y[k];
        for j in 0..k {
            last += f.g[j].conj() * (y[j] / (f.deltas[j] + self.lambda));
        }
        let xn = last / self.s_lambda;
        y[k] = xn;
        for j in 0..k {
            y[j] = (y[j] - f.g[j] * xn) / (f.deltas[j] + self.lambda);
        }
        4 * k as u64 + 1
    }
}

/// `(Δ_t + λ I)⁻¹ y` through the arrowhead LU: the last unknown first, then
/// the leading rows independently.
pub fn arrowhead_block_solve(block: &ArrowheadBlock<'_>, y: &[Complex64]) -> Result<Vec<Complex64>> {
    check_len(block.factors.n(), y.len())?;
    let mut x = y.to_vec();
    block.solve_in_place(&mut x);
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spline::{assemble_1d, Constraint, MatrixKind, SplineSpace};
    use crate::tensor::cond2;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn time_pair(p: usize, n: usize) -> (DenseMatrix, DenseMatrix) {
        let s = SplineSpace::with_dofs(p, n, 0.0, 1.0, Constraint::ZeroAtLeft).unwrap();
        (
            assemble_1d(&s, MatrixKind::Advection).to_dense(),
            assemble_1d(&s, MatrixKind::Mass).to_dense(),
        )
    }

    fn synthetic(n: usize, rng: &mut ChaCha8Rng) -> ArrowheadFactors {
        let deltas = (0..n - 1).map(|_| Complex64::new(0.0, rng.random_range(-5.0..5.0))).collect();
        let g = (0..n - 1)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        ArrowheadFactors {
            deltas,
            g,
            sigma: Complex64::new(rng.random_range(0.1..2.0), 0.0),
            u: ComplexMatrix::identity(n, n),
            rho: 1.0,
            setup_ops: 0,
        }
    }

    #[test]
    fn scalar_case() {
        let f = ArrowheadFactors::build(&DenseMatrix::from_element(1, 1, 0.5), &DenseMatrix::from_element(1, 1, 2.0)).unwrap();
        assert!((f.rho() - 2.0_f64.powf(-0.5)).abs() < 1e-15);
        assert!((f.sigma().re - 0.25).abs() < 1e-15);
        let b = f.block(3.0, 0).unwrap();
        let x = arrowhead_block_solve(&b, &[Complex64::new(6.5, 0.0)]).unwrap();
        assert!((x[0].re - 2.0).abs() < 1e-14);
    }

    #[test]
    fn decoupled_when_g_vanishes() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut f = synthetic(4, &mut rng);
        f.g.iter_mut().for_each(|g| *g = Complex64::new(0.0, 0.0));
        let b = f.block(0.7, 0).unwrap();
        let y: Vec<Complex64> = (0..4).map(|i| Complex64::new(i as f64 + 1.0, 0.5)).collect();
        let x = arrowhead_block_solve(&b, &y).unwrap();
        for j in 0..3 {
            assert!((x[j] - y[j] / (f.deltas[j] + 0.7)).norm() < 1e-15);
        }
        assert!((x[3] - y[3] / (f.sigma + 0.7)).norm() < 1e-15);
    }

    #[test]
    fn random_blocks_match_dense_solve() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let f = synthetic(4, &mut rng);
            let lambda = rng.random_range(0.1..10.0);
            let b = f.block(lambda, 0).unwrap();
            let y: Vec<Complex64> = (0..4).map(|_| Complex64::new(rng.random(), rng.random())).collect();
            let x = arrowhead_block_solve(&b, &y).unwrap();
            let dense = f.dense() + ComplexMatrix::identity(4, 4) * Complex64::new(lambda, 0.0);
            let oracle = dense.lu().solve(&nalgebra::DVector::from_vec(y.clone())).unwrap();
            let err: f64 = x.iter().zip(oracle.iter()).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
            assert!(err <= 1e-12 * oracle.norm());
        }
    }

    #[test]
    fn factors_reconstruct_shifted_block() {
        let (a, m) = time_pair(3, 16);
        let f = ArrowheadFactors::build(&a, &m).unwrap();
        for lambda in [0.5, 10.0, 1e4] {
            let b = f.block(lambda, 0).unwrap();
            let (l, r) = b.dense_factors();
            let target = f.dense() + ComplexMatrix::identity(16, 16) * Complex64::new(lambda, 0.0);
            assert!((l * r - &target).norm() <= 1e-13 * target.norm());
        }
    }

    #[test]
    fn galerkin_split_properties() {
        let (a, m) = time_pair(3, 32);
        let f = ArrowheadFactors::build(&a, &m).unwrap();
        let mc = to_complex(&m);
        let umu = f.u().adjoint() * &mc * f.u();
        assert!((umu - ComplexMatrix::identity(32, 32)).norm() <= 1e-10);
        let kappa = cond2(f.u());
        assert!((kappa - 5.2).abs() <= 0.52, "kappa {kappa}");
        assert!((kappa - cond2(&m).sqrt()).abs() <= 0.02 * kappa);
        assert!((f.sigma().re - 0.5 * f.rho() * f.rho()).abs() < 1e-12 * f.sigma().re);
        for w in f.deltas().windows(2) {
            assert!(w[0].im <= w[1].im);
        }
    }

    #[test]
    fn nonpositive_alpha_rejected() {
        let (mut a, m) = time_pair(2, 6);
        a[(5, 5)] = -0.5;
        assert!(matches!(
            ArrowheadFactors::build(&a, &m),
            Err(Error::ArrowheadPositivity { quantity: "alpha", .. })
        ));
    }

    #[test]
    fn reversed_basis_is_rejected() {
        // Reversing the basis moves the boundary term to the first entry.
        let (a, m) = time_pair(2, 6);
        let p = DenseMatrix::from_fn(6, 6, |i, j| if i + j == 5 { 1.0 } else { 0.0 });
        assert!(ArrowheadFactors::build(&(&p * &a * &p), &(&p * &m * &p)).is_err());
    }
}

use crate::error::{Error, Result};
use crate::solvers::{plan, Method, PlanOptions, SolverPlan, SpaceMatrices, SpaceTimeOperator};
use crate::spline::{assemble_1d, assemble_load, fd_time_operator, Constraint, MatrixKind, SplineSpace, TimePartition};
use crate::tensor::BandedMatrix;

/// How the time direction is discretized.
#[derive(Debug, Clone, PartialEq)]
pub enum TimeDiscretization {
    /// Spline Galerkin with zero initial value; trial and test spaces coincide.
    Galerkin(SplineSpace),
    /// Implicit Euler on the given steps.
    ImplicitEuler(TimePartition),
}

/// A discretized heat problem `A u = f`.
#[derive(Debug, Clone)]
pub struct SpaceTimeProblem {
    pub time: TimeDiscretization,
    /// One space per direction, direction 1 first.
    pub spaces: Vec<SplineSpace>,
    /// Name of the spatial domain.
    pub geometry: String,
    pub operator: SpaceTimeOperator,
    pub rhs: Vec<f64>,
}

/// Spline space on `[0, 1]` with `n_dofs` functions vanishing at `t = 0`.
pub fn time_space(degree: usize, n_dofs: usize) -> Result<SplineSpace> {
    SplineSpace::with_dofs(degree, n_dofs, 0.0, 1.0, Constraint::ZeroAtLeft)
}

/// Spline space on `[0, 1]` with `n_dofs` functions vanishing at both ends.
pub fn dirichlet_space(degree: usize, n_dofs: usize) -> Result<SplineSpace> {
    SplineSpace::with_dofs(degree, n_dofs, 0.0, 1.0, Constraint::ZeroAtBothEnds)
}

fn kron_vectors(time: &[f64], space: &[Vec<f64>]) -> Vec<f64> {
    // direction 1 varies fastest, time slowest
    let mut out = vec![1.0];
    for v in space.iter().chain(std::iter::once(&time.to_vec())) {
        let mut next = Vec::with_capacity(out.len() * v.len());
        for &a in v {
            next.extend(out.iter().map(|&b| a * b));
        }
        out = next;
    }
    out
}

fn space_matrices(spaces: &[SplineSpace]) -> SpaceMatrices {
    SpaceMatrices::laplacian(
        spaces
            .iter()
            .map(|s| (assemble_1d(s, MatrixKind::Stiffness).to_dense(), assemble_1d(s, MatrixKind::Mass).to_dense()))
            .collect(),
    )
}

impl SpaceTimeProblem {
    /// Galerkin heat problem on the unit hypercube with constant source.
    pub fn galerkin_cartesian(time: SplineSpace, spaces: Vec<SplineSpace>, source: f64) -> Result<Self> {
        if spaces.is_empty() {
            return Err(Error::InvalidInput("at least one space direction required".into()));
        }
        let a_t = assemble_1d(&time, MatrixKind::Advection);
        let m_t = assemble_1d(&time, MatrixKind::Mass);
        let loads: Vec<Vec<f64>> = spaces.iter().map(|s| assemble_load(s, |_| 1.0, 0)).collect();
        let mut rhs = kron_vectors(&assemble_load(&time, |_| 1.0, 0), &loads);
        rhs.iter_mut().for_each(|v| *v *= source);
        let operator = SpaceTimeOperator::new(a_t, m_t, space_matrices(&spaces))?;
        Ok(Self { time: TimeDiscretization::Galerkin(time), geometry: cube_name(spaces.len()), spaces, operator, rhs })
    }

    /// Implicit Euler in time, spline Galerkin in space, constant source.
    pub fn implicit_euler_cartesian(partition: TimePartition, spaces: Vec<SplineSpace>, source: f64) -> Result<Self> {
        if spaces.is_empty() {
            return Err(Error::InvalidInput("at least one space direction required".into()));
        }
        let a_t = fd_time_operator(&partition);
        let m_t = BandedMatrix::identity(partition.len());
        let loads: Vec<Vec<f64>> = spaces.iter().map(|s| assemble_load(s, |_| source, 0)).collect();
        let rhs = kron_vectors(&vec![1.0; partition.len()], &loads);
        let operator = SpaceTimeOperator::new(a_t, m_t, space_matrices(&spaces))?;
        Ok(Self {
            time: TimeDiscretization::ImplicitEuler(partition),
            geometry: cube_name(spaces.len()),
            spaces,
            operator,
            rhs,
        })
    }

    pub fn n_t(&self) -> usize {
        self.operator.n_t()
    }

    pub fn n_s(&self) -> usize {
        self.operator.n_s()
    }

    pub fn dim(&self) -> usize {
        self.n_t() * self.n_s()
    }

    /// Diagonalizes space and builds the plan for `method`.
    pub fn plan(&self, method: Method, options: &PlanOptions) -> Result<SolverPlan> {
        let space = self.operator.space().diagonalize()?;
        plan(method, self.operator.a_t(), self.operator.m_t(), space, options)
    }
}

fn cube_name(d: usize) -> String {
    match d {
        2 => "unit-square".into(),
        3 => "unit-cube".into(),
        d => format!("unit-{d}d"),
    }
}

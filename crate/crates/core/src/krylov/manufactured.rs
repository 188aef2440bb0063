use rayon::prelude::*;

use super::mapped::{assemble_mapped, MappedQuadrature, MappedSpaceMatrices};
use super::GeometryMap;
use crate::error::{check_len, Error, Result};
use crate::problem::{SpaceTimeProblem, TimeDiscretization};
use crate::solvers::{plan, Method, PlanOptions, SolverPlan, SpaceMatrices, SpaceTimeOperator};
use crate::spline::{assemble_1d, MatrixKind, SplineSpace};
use crate::tensor::{BandedMatrix, CsrMatrix};

/// Closed-form solutions with their heat sources `f = ∂_t u - Δu`.
///
/// With `P = (x₁²+x₂²-1)(x₁²+x₂²-4)` and `q = x₁x₂²`:
/// * `Annulus2d`: `u = -P q sin t`.
/// * `Annulus3d`: `u = -P q sin(x₃) sin t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExactSolution {
    Annulus2d,
    Annulus3d,
}

fn pq_terms(x: &[f64]) -> (f64, f64) {
    let s = x[0] * x[0] + x[1] * x[1];
    let p = (s - 1.0) * (s - 4.0);
    let q = x[0] * x[1] * x[1];
    // Δ(Pq) in the (x₁, x₂) plane
    let lap = q * (40.0 * s - 80.0) + 2.0 * x[0] * p;
    (p * q, lap)
}

impl ExactSolution {
    pub fn for_geometry(g: GeometryMap) -> Self {
        match g.dim() {
            2 => ExactSolution::Annulus2d,
            _ => ExactSolution::Annulus3d,
        }
    }

    pub fn dim(self) -> usize {
        match self {
            ExactSolution::Annulus2d => 2,
            ExactSolution::Annulus3d => 3,
        }
    }

    pub fn u(self, x: &[f64], t: f64) -> f64 {
        let (pq, _) = pq_terms(x);
        match self {
            ExactSolution::Annulus2d => -pq * t.sin(),
            ExactSolution::Annulus3d => -pq * x[2].sin() * t.sin(),
        }
    }

    pub fn source(self, x: &[f64], t: f64) -> f64 {
        let (pq, lap) = pq_terms(x);
        match self {
            ExactSolution::Annulus2d => -pq * t.cos() + t.sin() * lap,
            ExactSolution::Annulus3d => {
                let s3 = x[2].sin();
                -pq * s3 * t.cos() + t.sin() * s3 * (lap - pq)
            }
        }
    }
}

/// Heat problem on a mapped domain with a manufactured solution, together
/// with the parametric-domain matrices that define the preconditioner.
#[derive(Debug, Clone)]
pub struct ManufacturedProblem {
    pub geometry: GeometryMap,
    pub exact: ExactSolution,
    /// Interior unknowns only; the Dirichlet lift is already on the right-hand side.
    pub problem: SpaceTimeProblem,
    /// `Â_s`, `M̂_s` assembled on the unit square or cube.
    pub parametric: SpaceMatrices,
    /// Boundary coefficients, time-outer over (time dof, boundary dof).
    pub lift: Vec<f64>,
    space: MappedSpaceMatrices,
}

/// `(A_t ⊗ X + M_t ⊗ Y) v` for sparse `X`, `Y` and time-outer `v`.
fn time_space_apply(a_t: &BandedMatrix, m_t: &BandedMatrix, x: &CsrMatrix, y: &CsrMatrix, v: &[f64]) -> Result<Vec<f64>> {
    let (nt, nc, nr) = (a_t.n(), x.ncols(), x.nrows());
    check_len(nt * nc, v.len())?;
    let slices: Vec<(Vec<f64>, Vec<f64>)> = v
        .chunks(nc)
        .map(|vs| Ok((x.matvec(vs)?, y.matvec(vs)?)))
        .collect::<Result<_>>()?;
    let mut out = vec![0.0; nt * nr];
    for j in 0..nt {
        for k in 0..nt {
            let (at, mt) = (a_t.get(j, k), m_t.get(j, k));
            if at == 0.0 && mt == 0.0 {
                continue;
            }
            for i in 0..nr {
                out[j * nr + i] += at * slices[k].0[i] + mt * slices[k].1[i];
            }
        }
    }
    Ok(out)
}

fn greville_points(spaces: &[SplineSpace], full: usize) -> Vec<f64> {
    let mut r = full;
    spaces
        .iter()
        .map(|s| {
            let g = s.greville()[r % s.n_full()];
            r /= s.n_full();
            g
        })
        .collect()
}

struct TimePoint {
    t: f64,
    w: f64,
    first: usize,
    vals: Vec<f64>,
}

fn time_points(time: &SplineSpace, extra: usize) -> Vec<TimePoint> {
    let mut out = Vec::new();
    crate::spline::assembly::for_each_quad_point(time, extra, 0, |t, w, b| {
        out.push(TimePoint { t, w, first: b.first, vals: b.ders[0].clone() });
    });
    out
}

/// Builds the Galerkin system on `geometry` for the registered exact
/// solution. `time` must vanish at `t = 0`; `spaces` carry homogeneous
/// Dirichlet constraints, one per parametric direction.
pub fn manufactured_problem(
    geometry: GeometryMap,
    time: SplineSpace,
    spaces: Vec<SplineSpace>,
) -> Result<ManufacturedProblem> {
    let exact = ExactSolution::for_geometry(geometry);
    if exact.dim() != spaces.len() {
        return Err(Error::InvalidInput(format!("no exact solution registered for {geometry} in {}D", spaces.len())));
    }
    let space = assemble_mapped(geometry, &spaces)?;
    let a_t = assemble_1d(&time, MatrixKind::Advection);
    let m_t = assemble_1d(&time, MatrixKind::Mass);
    let (nt, ns, nb) = (time.n_funcs(), space.dim(), space.boundary.len());

    let t_grev = time.greville();
    let mut t_nodes = vec![0.0; nt];
    for (full, &t) in t_grev.iter().enumerate() {
        if let Some(k) = time.constrained_index(full) {
            t_nodes[k] = t;
        }
    }
    let b_phys: Vec<Vec<f64>> = space
        .boundary
        .iter()
        .map(|&full| geometry.eval(&greville_points(&spaces, full)).0)
        .collect();
    let lift: Vec<f64> = t_nodes
        .iter()
        .flat_map(|&t| b_phys.iter().map(move |x| exact.u(x, t)))
        .collect();

    let mut rhs = space_time_load(geometry, &time, &spaces, &space, exact)?;
    let lifted = time_space_apply(&a_t, &m_t, &space.m_boundary, &space.a_boundary, &lift)?;
    rhs.iter_mut().zip(&lifted).for_each(|(r, l)| *r -= l);
    debug_assert_eq!(rhs.len(), nt * ns);
    debug_assert_eq!(lift.len(), nt * nb);

    let parametric = SpaceMatrices::laplacian(
        spaces
            .iter()
            .map(|s| (assemble_1d(s, MatrixKind::Stiffness).to_dense(), assemble_1d(s, MatrixKind::Mass).to_dense()))
            .collect(),
    );
    let operator = SpaceTimeOperator::new(
        a_t,
        m_t,
        SpaceMatrices::Mapped { a: space.a.clone(), m: space.m.clone() },
    )?;
    Ok(ManufacturedProblem {
        geometry,
        exact,
        problem: SpaceTimeProblem {
            time: TimeDiscretization::Galerkin(time),
            spaces,
            geometry: geometry.name().into(),
            operator,
            rhs,
        },
        parametric,
        lift,
        space,
    })
}

fn space_time_load(
    geometry: GeometryMap,
    time: &SplineSpace,
    spaces: &[SplineSpace],
    space: &MappedSpaceMatrices,
    exact: ExactSolution,
) -> Result<Vec<f64>> {
    let quad = MappedQuadrature::new(geometry, spaces, 2)?;
    let tps = time_points(time, 2);
    let n_full: usize = quad.full_sizes().iter().product();
    let mut to_int = vec![usize::MAX; n_full];
    for (i, &f) in space.interior.iter().enumerate() {
        to_int[f] = i;
    }
    let (nt, ns) = (time.n_funcs(), space.dim());
    let parts = (0..quad.n_elements())
        .into_par_iter()
        .map(|e| {
            let el = quad.element(e)?;
            let mut local = vec![0.0; nt * el.dofs.len()];
            for p in &el.points {
                for tp in &tps {
                    let fw = exact.source(&p.phys, tp.t) * p.weight * tp.w;
                    for (r, bt) in tp.vals.iter().enumerate() {
                        if let Some(k) = time.constrained_index(tp.first + r) {
                            let row = &mut local[k * el.dofs.len()..(k + 1) * el.dofs.len()];
                            row.iter_mut().zip(&p.values).for_each(|(l, v)| *l += fw * bt * v);
                        }
                    }
                }
            }
            Ok((el.dofs, local))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut rhs = vec![0.0; nt * ns];
    for (dofs, local) in parts {
        for k in 0..nt {
            for (a, &d) in dofs.iter().enumerate() {
                if to_int[d] != usize::MAX {
                    rhs[k * ns + to_int[d]] += local[k * dofs.len() + a];
                }
            }
        }
    }
    Ok(rhs)
}

impl ManufacturedProblem {
    /// Solver plan for `Â = A_t ⊗ M̂_s + M_t ⊗ Â_s`.
    pub fn preconditioner(&self, method: Method, options: &PlanOptions) -> Result<SolverPlan> {
        let op = &self.problem.operator;
        plan(method, op.a_t(), op.m_t(), self.parametric.diagonalize()?, options)
    }

    /// Space-time `L²` error of the discrete solution (interior unknowns
    /// plus lift) against the exact solution.
    pub fn l2_error(&self, u: &[f64]) -> Result<f64> {
        let prob = &self.problem;
        check_len(prob.dim(), u.len())?;
        let TimeDiscretization::Galerkin(time) = &prob.time else {
            unreachable!("manufactured problems are Galerkin in time")
        };
        let quad = MappedQuadrature::new(self.geometry, &prob.spaces, 2)?;
        let n_full: usize = quad.full_sizes().iter().product();
        let nt_full = time.n_full();
        let (ns, nb) = (prob.n_s(), self.space.boundary.len());
        let mut coef = vec![0.0; nt_full * n_full];
        for kf in 0..nt_full {
            if let Some(k) = time.constrained_index(kf) {
                for (i, &f) in self.space.interior.iter().enumerate() {
                    coef[kf * n_full + f] = u[k * ns + i];
                }
                for (b, &f) in self.space.boundary.iter().enumerate() {
                    coef[kf * n_full + f] = self.lift[k * nb + b];
                }
            }
        }
        let tps = time_points(time, 2);
        let exact = self.exact;
        let sq: f64 = (0..quad.n_elements())
            .into_par_iter()
            .map(|e| {
                let el = quad.element(e)?;
                let mut acc = 0.0;
                let mut slab = vec![0.0; nt_full];
                for p in &el.points {
                    for (kf, s) in slab.iter_mut().enumerate() {
                        let row = &coef[kf * n_full..(kf + 1) * n_full];
                        *s = el.dofs.iter().zip(&p.values).map(|(&d, v)| row[d] * v).sum();
                    }
                    for tp in &tps {
                        let uh: f64 = tp.vals.iter().enumerate().map(|(r, b)| b * slab[tp.first + r]).sum();
                        let diff = uh - exact.u(&p.phys, tp.t);
                        acc += diff * diff * p.weight * tp.w;
                    }
                }
                Ok(acc)
            })
            .collect::<Result<Vec<f64>>>()?
            .into_iter()
            .sum();
        Ok(sq.sqrt())
    }
}

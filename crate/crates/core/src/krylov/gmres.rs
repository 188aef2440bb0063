use crate::error::{check_len, Result};
use crate::solvers::{LinearOperator, SolverPlan};

/// Outcome of [`gmres`]. Non-convergence is reported here, not as an error.
#[derive(Debug, Clone, PartialEq)]
pub struct GmresResult {
    pub x: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// `‖P⁻¹(f - A x_k)‖ / ‖P⁻¹ f‖` for `k = 0..=iterations`.
    pub history: Vec<f64>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `Â⁻¹ r` through a solver plan built on the parametric-domain matrices.
pub fn precondition_apply(plan: &SolverPlan, r: &[f64]) -> Result<Vec<f64>> {
    plan.apply(r)
}

/// Left-preconditioned GMRES without restarts, zero initial guess,
/// modified Gram-Schmidt Arnoldi and Givens rotations.
pub fn gmres(
    op: &dyn LinearOperator,
    prec: &dyn LinearOperator,
    f: &[f64],
    tol: f64,
    max_iter: usize,
) -> Result<GmresResult> {
    let n = op.dim();
    check_len(n, f.len())?;
    check_len(n, prec.dim())?;
    let r0 = prec.apply(f)?;
    let beta = norm(&r0);
    if beta == 0.0 {
        return Ok(GmresResult { x: vec![0.0; n], iterations: 0, converged: true, history: vec![0.0] });
    }
    let mut basis: Vec<Vec<f64>> = vec![r0.iter().map(|v| v / beta).collect()];
    // column j of the Hessenberg matrix, already rotated
    let mut h_cols: Vec<Vec<f64>> = Vec::new();
    let mut rot: Vec<(f64, f64)> = Vec::new();
    let mut g = vec![beta];
    let mut history = vec![1.0];
    let mut converged = false;

    while h_cols.len() < max_iter {
        let j = h_cols.len();
        let mut w = prec.apply(&op.apply(&basis[j])?)?;
        let mut h = vec![0.0; j + 2];
        for (i, v) in basis.iter().enumerate() {
            h[i] = dot(&w, v);
            w.iter_mut().zip(v).for_each(|(wk, vk)| *wk -= h[i] * vk);
        }
        h[j + 1] = norm(&w);
        for (i, &(c, s)) in rot.iter().enumerate() {
            let (a, b) = (h[i], h[i + 1]);
            h[i] = c * a + s * b;
            h[i + 1] = -s * a + c * b;
        }
        let rr = h[j].hypot(h[j + 1]);
        let (c, s) = if rr == 0.0 { (1.0, 0.0) } else { (h[j] / rr, h[j + 1] / rr) };
        let hj1 = h[j + 1];
        h[j] = rr;
        h[j + 1] = 0.0;
        rot.push((c, s));
        g.push(-s * g[j]);
        g[j] *= c;
        h_cols.push(h);
        let rel = g[j + 1].abs() / beta;
        history.push(rel);
        if rel <= tol {
            converged = true;
            break;
        }
        if hj1 == 0.0 {
            // lucky breakdown: the Krylov space is invariant
            converged = true;
            break;
        }
        basis.push(w.iter().map(|v| v / hj1).collect());
    }

    let k = h_cols.len();
    let mut y = vec![0.0; k];
    for i in (0..k).rev() {
        let s: f64 = (i + 1..k).map(|c| h_cols[c][i] * y[c]).sum();
        y[i] = (g[i] - s) / h_cols[i][i];
    }
    let mut x = vec![0.0; n];
    for (yi, v) in y.iter().zip(&basis) {
        x.iter_mut().zip(v).for_each(|(xk, vk)| *xk += yi * vk);
    }
    Ok(GmresResult { x, iterations: k, converged, history })
}

//! GMRES with the solver plans of the parametric-domain operator as preconditioner.

use std::path::Path;
use std::time::Instant;

use heatkron::krylov::{gmres, manufactured_problem, GeometryMap};
use heatkron::solvers::{Method, PlanOptions};
use heatkron::spline::{Constraint, SplineSpace};

use crate::config::{Defaults, RunConfig};
use crate::output::{sci, write_csv, Report};
use crate::CliError;

/// `--ps` sweeps the common degree; `--nt`/`--ns` count elements, and an
/// empty `--ns` reuses the time element count.
pub const DEFAULTS: Defaults = Defaults {
    pt: &[1],
    ps: &[1, 2],
    nt: &[8],
    ns: &[],
    methods: &[Method::Lu, Method::Ar, Method::Lr],
    geometry: GeometryMap::RotatedQuarterAnnulus3d,
    tol: 1e-8,
};

pub fn run(cfg: &RunConfig, max_iter: usize, history: Option<&Path>) -> Result<Report, CliError> {
    if let Some(dir) = history {
        std::fs::create_dir_all(dir)?;
    }
    let mut report = Report::new(vec![
        "geometry", "p", "n_t", "n_s", "method", "iterations", "converged", "final_residual", "l2_error", "wall_s",
    ]);
    let d = cfg.geometry.dim();
    for &p in &cfg.ps {
        for &n_t in &cfg.nt {
            let space_sizes = if cfg.ns.is_empty() { vec![n_t] } else { cfg.ns.clone() };
            for n_s in space_sizes {
                let time = SplineSpace::uniform(p, n_t, 0.0, 1.0, Constraint::ZeroAtLeft)?;
                let s = SplineSpace::uniform(p, n_s, 0.0, 1.0, Constraint::ZeroAtBothEnds)?;
                let mp = manufactured_problem(cfg.geometry, time, vec![s; d])?;
                let mut counts = Vec::new();
                for &m in &cfg.methods {
                    let t0 = Instant::now();
                    let pc = mp.preconditioner(m, &PlanOptions::default())?;
                    let r = gmres(&mp.problem.operator, &pc, &mp.problem.rhs, cfg.tol, max_iter)?;
                    let wall = t0.elapsed().as_secs_f64();
                    let err = mp.l2_error(&r.x)?;
                    if !r.converged {
                        report.fail(format!("{m} p={p} n_t={n_t} n_s={n_s}: no convergence in {max_iter} iterations"));
                    }
                    if let Some(dir) = history {
                        let rows: Vec<Vec<String>> =
                            r.history.iter().enumerate().map(|(k, v)| vec![k.to_string(), sci(*v)]).collect();
                        let path = dir.join(format!("{}-p{p}-nt{n_t}-ns{n_s}-{m}.csv", cfg.geometry));
                        write_csv(std::fs::File::create(path)?, &["iter", "residual"], &rows)?;
                    }
                    report.push(vec![
                        cfg.geometry.to_string(),
                        p.to_string(),
                        n_t.to_string(),
                        n_s.to_string(),
                        m.to_string(),
                        r.iterations.to_string(),
                        r.converged.to_string(),
                        sci(*r.history.last().unwrap_or(&f64::NAN)),
                        sci(err),
                        sci(wall),
                    ]);
                    counts.push(r.iterations);
                }
                if counts.windows(2).any(|w| w[0] != w[1]) {
                    report.fail(format!("p={p} n_t={n_t} n_s={n_s}: iteration counts differ {counts:?}"));
                }
            }
        }
    }
    Ok(report)
}

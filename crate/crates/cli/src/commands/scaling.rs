//! Size ladders: counters are asserted, wall-clock slopes are only reported.

use std::time::Instant;

use heatkron::krylov::GeometryMap;
use heatkron::problem::{dirichlet_space, time_space, SpaceTimeProblem};
use heatkron::solvers::{Method, PlanOptions};

use crate::config::{Defaults, RunConfig};
use crate::output::{loglog_slope, sci, Report};
use crate::CliError;

pub const DEFAULTS: Defaults = Defaults {
    pt: &[2],
    ps: &[2],
    nt: &[],
    ns: &[4, 6, 8, 10],
    methods: &Method::ALL,
    geometry: GeometryMap::UnitCube,
    tol: 1e-8,
};

/// Accepted deviation of the block-counter slope from linear.
const SLOPE_BAND: f64 = 0.1;

pub fn run(cfg: &RunConfig) -> Result<Report, CliError> {
    let d = cfg.cartesian_dim()?;
    if cfg.ns.len() < 4 {
        return Err(CliError::Usage("scaling needs a ladder of at least 4 sizes in --ns".into()));
    }
    let fixed_nt = match cfg.nt.as_slice() {
        [] => None,
        [n] => Some(*n),
        _ => return Err(CliError::Usage("scaling takes at most one --nt value".into())),
    };
    let (p_t, p_s) = (cfg.pt[0], cfg.ps[0]);
    let mut report = Report::new(vec![
        "method", "n_t", "n_s", "n", "setup_s", "apply_s", "setup_ops", "transform_ops", "block_ops",
    ]);
    for &m in &cfg.methods {
        let mut series: Vec<[f64; 4]> = Vec::new();
        for &n_l in &cfg.ns {
            let n_t = fixed_nt.unwrap_or(n_l);
            let spaces = (0..d).map(|_| dirichlet_space(p_s, n_l)).collect::<Result<Vec<_>, _>>()?;
            let prob = SpaceTimeProblem::galerkin_cartesian(time_space(p_t, n_t)?, spaces, 1.0)?;
            let t0 = Instant::now();
            let plan = prob.plan(m, &PlanOptions::default())?;
            let setup_s = t0.elapsed().as_secs_f64();
            let t1 = Instant::now();
            let (_, ops) = plan.apply_instrumented(&prob.rhs)?;
            let apply_s = t1.elapsed().as_secs_f64();
            report.push(vec![
                m.to_string(),
                n_t.to_string(),
                prob.n_s().to_string(),
                prob.dim().to_string(),
                sci(setup_s),
                sci(apply_s),
                plan.setup_ops().total().to_string(),
                ops.transform.to_string(),
                ops.block.to_string(),
            ]);
            series.push([prob.dim() as f64, ops.block as f64, setup_s, apply_s]);
        }
        let col = |k: usize| series.iter().map(|r| r[k]).collect::<Vec<_>>();
        let n = col(0);
        let block = loglog_slope(&n, &col(1));
        eprintln!(
            "{m}: block_ops slope {block:.3}, setup_s slope {:.3}, apply_s slope {:.3}",
            loglog_slope(&n, &col(2)),
            loglog_slope(&n, &col(3))
        );
        if (block - 1.0).abs() > SLOPE_BAND {
            report.fail(format!("{m}: block-op slope {block:.3} outside 1 ± {SLOPE_BAND}"));
        }
    }
    Ok(report)
}

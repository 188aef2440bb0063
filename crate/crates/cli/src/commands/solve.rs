//! Direct solves with `f = 1` on Cartesian domains.

use std::time::Instant;

use heatkron::krylov::GeometryMap;
use heatkron::problem::{dirichlet_space, time_space, SpaceTimeProblem};
use heatkron::solvers::{residual, Method, PlanOptions};
use heatkron::spline::TimePartition;
use nalgebra::DVector;

use super::rel_diff;
use crate::config::{Defaults, RunConfig};
use crate::output::{sci, Report};
use crate::{CliError, TimeScheme};

pub const DEFAULTS: Defaults = Defaults {
    pt: &[2],
    ps: &[2],
    nt: &[8],
    ns: &[8],
    methods: &Method::ALL,
    geometry: GeometryMap::UnitCube,
    tol: 1e-8,
};

/// Above this size the dense oracle column is left empty.
const ORACLE_MAX_DIM: usize = 1500;

fn build(scheme: TimeScheme, beta: f64, p_t: usize, n_t: usize, p_s: usize, n_s: usize, d: usize) -> Result<SpaceTimeProblem, CliError> {
    let spaces = (0..d).map(|_| dirichlet_space(p_s, n_s)).collect::<Result<Vec<_>, _>>()?;
    let prob = match scheme {
        TimeScheme::Galerkin => SpaceTimeProblem::galerkin_cartesian(time_space(p_t, n_t)?, spaces, 1.0)?,
        TimeScheme::FdUniform => SpaceTimeProblem::implicit_euler_cartesian(TimePartition::uniform(1.0, n_t)?, spaces, 1.0)?,
        TimeScheme::FdGeometric => {
            SpaceTimeProblem::implicit_euler_cartesian(TimePartition::geometric(1.0, n_t, beta)?, spaces, 1.0)?
        }
    };
    Ok(prob)
}

struct Outcome {
    method: Method,
    setup_s: f64,
    apply_s: f64,
    result: Result<(Vec<f64>, [u64; 3]), String>,
}

pub fn run(cfg: &RunConfig, scheme: TimeScheme, beta: f64) -> Result<Report, CliError> {
    let d = cfg.cartesian_dim()?;
    let scheme_name = match scheme {
        TimeScheme::Galerkin => "galerkin",
        TimeScheme::FdUniform => "fd-uniform",
        TimeScheme::FdGeometric => "fd-geometric",
    };
    let mut header = vec![
        "time", "p_t", "p_s", "n_t", "n_s", "dim", "method", "status", "setup_s", "apply_s", "residual", "cross_diff",
        "oracle_diff",
    ];
    if cfg.instrument {
        header.extend(["setup_ops", "transform_ops", "block_ops"]);
    }
    let mut report = Report::new(header);
    for &p_t in &cfg.pt {
        for &p_s in &cfg.ps {
            for &n_t in &cfg.nt {
                for &n_s in &cfg.ns {
                    let prob = build(scheme, beta, p_t, n_t, p_s, n_s, d)?;
                    let oracle = (prob.dim() <= ORACLE_MAX_DIM).then(|| {
                        prob.operator
                            .to_dense()
                            .lu()
                            .solve(&DVector::from_column_slice(&prob.rhs))
                            .map(|v| v.as_slice().to_vec())
                    });
                    let outcomes: Vec<Outcome> = cfg.methods.iter().map(|&m| solve_one(&prob, m)).collect();
                    let reference = outcomes.iter().find_map(|o| o.result.as_ref().ok().map(|r| &r.0));
                    for o in &outcomes {
                        let mut row = vec![
                            scheme_name.to_string(),
                            p_t.to_string(),
                            p_s.to_string(),
                            n_t.to_string(),
                            n_s.to_string(),
                            prob.dim().to_string(),
                            o.method.to_string(),
                        ];
                        match &o.result {
                            Ok((u, ops)) => {
                                let res = residual(&prob.operator, u, &prob.rhs)?;
                                let cross = reference.map_or(0.0, |r| rel_diff(u, r));
                                let orc = oracle.as_ref().and_then(|s| s.as_ref()).map(|s| rel_diff(u, s));
                                let cell = format!("{} p_t={p_t} p_s={p_s} n_t={n_t} n_s={n_s}", o.method);
                                if res > cfg.tol {
                                    report.fail(format!("{cell}: residual {res:.3e} > {:.1e}", cfg.tol));
                                }
                                if cross > cfg.tol {
                                    report.fail(format!("{cell}: cross-method difference {cross:.3e}"));
                                }
                                row.extend([
                                    "ok".to_string(),
                                    sci(o.setup_s),
                                    sci(o.apply_s),
                                    sci(res),
                                    sci(cross),
                                    orc.map(sci).unwrap_or_default(),
                                ]);
                                if cfg.instrument {
                                    row.extend(ops.iter().map(|v| v.to_string()));
                                }
                            }
                            Err(msg) => {
                                row.push(msg.clone());
                                row.extend(std::iter::repeat_n(String::new(), 5));
                                if cfg.instrument {
                                    row.extend(std::iter::repeat_n(String::new(), 3));
                                }
                            }
                        }
                        report.push(row);
                    }
                }
            }
        }
    }
    Ok(report)
}

fn solve_one(prob: &SpaceTimeProblem, method: Method) -> Outcome {
    let t0 = Instant::now();
    let plan = prob.plan(method, &PlanOptions::default());
    let setup_s = t0.elapsed().as_secs_f64();
    let plan = match plan {
        Ok(p) => p,
        Err(e) => return Outcome { method, setup_s, apply_s: 0.0, result: Err(e.to_string()) },
    };
    let t1 = Instant::now();
    let applied = plan.apply_instrumented(&prob.rhs);
    let apply_s = t1.elapsed().as_secs_f64();
    let setup = plan.setup_ops().total();
    let result = applied.map(|(u, ops)| (u, [setup, ops.transform, ops.block])).map_err(|e| e.to_string());
    Outcome { method, setup_s, apply_s, result }
}

//! Conditioning of the time eigenvector matrix.

use heatkron::eigen::nonsym_geig;
use heatkron::krylov::GeometryMap;
use heatkron::solvers::{ArrowheadFactors, Method};
use heatkron::tensor::cond2;
use heatkron::Error;
use rayon::prelude::*;

use super::time_pair;
use crate::config::{Defaults, RunConfig};
use crate::output::{sci, Report};
use crate::{CliError, CondMode};

pub const DEFAULTS: Defaults = Defaults {
    pt: &[1, 2, 3, 4, 5],
    ps: &[2],
    nt: &[32, 64],
    ns: &[8],
    methods: &Method::ALL,
    geometry: GeometryMap::UnitCube,
    tol: 1e-8,
};

fn kappa(mode: CondMode, p: usize, n: usize) -> Result<f64, CliError> {
    let (a, m) = time_pair(p, n)?;
    match mode {
        CondMode::Ar => Ok(cond2(ArrowheadFactors::build(&a, &m)?.u())),
        CondMode::Dt => match nonsym_geig(&a, &m) {
            Ok(g) => Ok(cond2(&g.vectors)),
            Err(Error::DefectivePencil { .. }) => Ok(f64::INFINITY),
            Err(e) => Err(e.into()),
        },
    }
}

pub fn run(cfg: &RunConfig, mode: CondMode) -> Result<Report, CliError> {
    let cells: Vec<(usize, usize)> = cfg.nt.iter().flat_map(|&n| cfg.pt.iter().map(move |&p| (n, p))).collect();
    let values: Vec<f64> = cells.par_iter().map(|&(n, p)| kappa(mode, p, n)).collect::<Result<_, _>>()?;
    let mut report = Report::new(vec!["mode", "n_t", "p_t", "kappa2"]);
    let name = match mode {
        CondMode::Dt => "dt",
        CondMode::Ar => "ar",
    };
    for (&(n, p), v) in cells.iter().zip(values) {
        report.push(vec![name.into(), n.to_string(), p.to_string(), sci(v)]);
    }
    Ok(report)
}

//! Flag and key=value file merging. Flags win over the file, the file wins
//! over per-command defaults.

use std::collections::HashMap;
use std::path::PathBuf;
use std::str::FromStr;

use clap::Args;
use heatkron::krylov::GeometryMap;
use heatkron::solvers::Method;

use crate::CliError;

#[derive(Args, Debug, Default)]
pub struct CommonArgs {
    /// Time degrees (comma-separated sweep).
    #[arg(long, value_delimiter = ',')]
    pub pt: Option<Vec<usize>>,
    /// Space degrees (comma-separated sweep).
    #[arg(long, value_delimiter = ',')]
    pub ps: Option<Vec<usize>>,
    /// Time sizes (comma-separated sweep).
    #[arg(long, value_delimiter = ',')]
    pub nt: Option<Vec<usize>>,
    /// Per-direction space sizes (comma-separated sweep).
    #[arg(long, value_delimiter = ',')]
    pub ns: Option<Vec<usize>>,
    /// Methods among dt, lu, ar, lr.
    #[arg(long, value_delimiter = ',')]
    pub methods: Option<Vec<Method>>,
    /// Geometry id.
    #[arg(long)]
    pub geometry: Option<GeometryMap>,
    /// Relative tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Seed for randomized inputs.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output path; `-` writes to standard output.
    #[arg(long, short)]
    pub output: Option<String>,
    /// Record operation counters.
    #[arg(long)]
    pub instrument: bool,
    /// key=value file supplying any of the flags above.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// Per-command fallbacks. An empty `nt` means "follow the space ladder".
pub struct Defaults {
    pub pt: &'static [usize],
    pub ps: &'static [usize],
    pub nt: &'static [usize],
    pub ns: &'static [usize],
    pub methods: &'static [Method],
    pub geometry: GeometryMap,
    pub tol: f64,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub pt: Vec<usize>,
    pub ps: Vec<usize>,
    pub nt: Vec<usize>,
    pub ns: Vec<usize>,
    pub methods: Vec<Method>,
    pub geometry: GeometryMap,
    pub tol: f64,
    pub seed: u64,
    pub output: String,
    pub instrument: bool,
}

const KEYS: [&str; 10] = ["pt", "ps", "nt", "ns", "methods", "geometry", "tol", "seed", "output", "instrument"];

fn parse_file(path: &PathBuf) -> Result<HashMap<String, String>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    let mut map = HashMap::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("config line {}: expected key=value", no + 1)))?;
        let k = k.trim().replace('_', "-");
        if !KEYS.contains(&k.as_str()) {
            return Err(CliError::Usage(format!("config line {}: unknown key `{k}`", no + 1)));
        }
        map.insert(k, v.trim().to_string());
    }
    Ok(map)
}

fn parse_one<T: FromStr>(key: &str, v: &str) -> Result<T, CliError>
where
    T::Err: std::fmt::Display,
{
    v.parse().map_err(|e| CliError::Usage(format!("config `{key}`: {e}")))
}

fn parse_list<T: FromStr>(key: &str, v: &str) -> Result<Vec<T>, CliError>
where
    T::Err: std::fmt::Display,
{
    if v.trim().is_empty() {
        return Ok(Vec::new());
    }
    v.split(',').map(|s| parse_one(key, s.trim())).collect()
}

impl RunConfig {
    pub fn resolve(args: &CommonArgs, d: &Defaults) -> Result<Self, CliError> {
        let file = match &args.config {
            Some(p) => parse_file(p)?,
            None => HashMap::new(),
        };
        let list = |flag: &Option<Vec<usize>>, key: &str, def: &[usize]| -> Result<Vec<usize>, CliError> {
            match (flag, file.get(key)) {
                (Some(v), _) => Ok(v.clone()),
                (None, Some(s)) => parse_list(key, s),
                (None, None) => Ok(def.to_vec()),
            }
        };
        let methods = match (&args.methods, file.get("methods")) {
            (Some(v), _) => v.clone(),
            (None, Some(s)) => parse_list("methods", s)?,
            (None, None) => d.methods.to_vec(),
        };
        if methods.is_empty() {
            return Err(CliError::Usage("empty method set".into()));
        }
        let mut dedup = Vec::new();
        for m in methods {
            if !dedup.contains(&m) {
                dedup.push(m);
            }
        }
        let cfg = RunConfig {
            pt: list(&args.pt, "pt", d.pt)?,
            ps: list(&args.ps, "ps", d.ps)?,
            nt: list(&args.nt, "nt", d.nt)?,
            ns: list(&args.ns, "ns", d.ns)?,
            methods: dedup,
            geometry: match (&args.geometry, file.get("geometry")) {
                (Some(g), _) => *g,
                (None, Some(s)) => parse_one("geometry", s)?,
                (None, None) => d.geometry,
            },
            tol: match (args.tol, file.get("tol")) {
                (Some(t), _) => t,
                (None, Some(s)) => parse_one("tol", s)?,
                (None, None) => d.tol,
            },
            seed: match (args.seed, file.get("seed")) {
                (Some(s), _) => s,
                (None, Some(s)) => parse_one("seed", s)?,
                (None, None) => 0,
            },
            output: match (&args.output, file.get("output")) {
                (Some(o), _) => o.clone(),
                (None, Some(s)) => s.clone(),
                (None, None) => "-".into(),
            },
            instrument: args.instrument
                || match file.get("instrument") {
                    Some(s) => parse_one::<bool>("instrument", s)?,
                    None => false,
                },
        };
        if cfg.pt.iter().chain(&cfg.ps).any(|&p| p == 0) {
            return Err(CliError::Usage("degrees must be at least 1".into()));
        }
        if cfg.ns.iter().chain(&cfg.nt).any(|&n| n < 2) {
            return Err(CliError::Usage("sizes must be at least 2".into()));
        }
        if cfg.tol.is_nan() || cfg.tol <= 0.0 {
            return Err(CliError::Usage("tolerance must be positive".into()));
        }
        Ok(cfg)
    }

    /// Spatial dimension implied by a Cartesian geometry.
    pub fn cartesian_dim(&self) -> Result<usize, CliError> {
        if !self.geometry.is_cartesian() {
            return Err(CliError::Usage(format!("geometry `{}` is not Cartesian", self.geometry)));
        }
        Ok(self.geometry.dim())
    }
}

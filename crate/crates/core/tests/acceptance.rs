//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use heatkron::eigen::{fast_diag_space, nonsym_geig, KronTerm};
use heatkron::krylov::{gmres, manufactured_problem, GeometryMap};
use heatkron::problem::{dirichlet_space, time_space, SpaceTimeProblem};
use heatkron::solvers::{
    smw_block_solve, smw_capacitance, ArrowheadFactors, LowRank, Method, PlanOptions, SmwBlock,
};
use heatkron::spline::{assemble_1d, Constraint, MatrixKind, SplineSpace, TimePartition};
use heatkron::tensor::{cond2, ComplexMatrix, DenseMatrix};
use heatkron::Error;
use nalgebra::DVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome, u64);

const EXACT: [Method; 3] = [Method::Lu, Method::Ar, Method::Lr];

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn rel_diff(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    let den: f64 = b.iter().map(|y| y * y).sum::<f64>().sqrt();
    num / den
}

fn time_pair(p: usize, n: usize) -> (DenseMatrix, DenseMatrix) {
    let s = time_space(p, n).unwrap();
    (assemble_1d(&s, MatrixKind::Advection).to_dense(), assemble_1d(&s, MatrixKind::Mass).to_dense())
}

fn galerkin(p_t: usize, n_t: usize, p_s: usize, ns: &[usize]) -> SpaceTimeProblem {
    SpaceTimeProblem::galerkin_cartesian(
        time_space(p_t, n_t).unwrap(),
        ns.iter().map(|&n| dirichlet_space(p_s, n).unwrap()).collect(),
        1.0,
    )
    .unwrap()
}

fn ar_cond(p: usize, n: usize) -> f64 {
    let (a, m) = time_pair(p, n);
    cond2(ArrowheadFactors::build(&a, &m).unwrap().u())
}

fn c1_ar_conditioning() -> Outcome {
    let target = [2.0, 3.3, 5.2, 8.3, 13.0];
    let mut report = Vec::new();
    for (k, &t) in target.iter().enumerate() {
        let p = k + 1;
        let vals: Vec<f64> = [32, 64, 128].iter().map(|&n| ar_cond(p, n)).collect();
        for &v in &vals {
            ensure!((v - t).abs() <= 0.1 * t, "p={p}: kappa {v:.3} vs {t}");
        }
        let (lo, hi) = vals.iter().fold((f64::MAX, 0.0_f64), |(l, h), &v| (l.min(v), h.max(v)));
        ensure!(hi / lo - 1.0 < 0.05, "p={p}: variation across N_t {:.3}", hi / lo - 1.0);
        report.push(format!("{:.2}", vals[0]));
    }
    Ok(format!("kappa(U_t) = [{}]", report.join(", ")))
}

fn c2_dt_instability() -> Outcome {
    let mut vals = Vec::new();
    for (n, t) in [(32, 2.7e4), (64, 2.8e5)] {
        let (a, m) = time_pair(3, n);
        let v = cond2(&nonsym_geig(&a, &m).map_err(|e| e.to_string())?.vectors);
        ensure!(v >= t / 10.0 && v <= t * 10.0, "N_t={n}: kappa {v:.3e} vs {t:.1e}");
        vals.push(v);
    }
    ensure!(vals[1] > vals[0], "not increasing: {vals:?}");
    Ok(format!("kappa(U_t) = {:.2e}, {:.2e}", vals[0], vals[1]))
}

fn c3_sqrt_identity() -> Outcome {
    let mut worst = 0.0_f64;
    for p in 1..=5 {
        let (a, m) = time_pair(p, 64);
        let k_u = cond2(ArrowheadFactors::build(&a, &m).unwrap().u());
        let k_m = cond2(&m).sqrt();
        worst = worst.max((k_u - k_m).abs() / k_m);
    }
    ensure!(worst <= 0.02, "max relative deviation {worst:.2e}");
    Ok(format!("max |kappa(U_t) - sqrt(kappa(M_t))| / sqrt(kappa(M_t)) = {worst:.2e}"))
}

fn c4_oracle_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst = 0.0_f64;
    let mut count = 0;
    while count < 20 {
        let d = rng.random_range(1..=3);
        let p_t = rng.random_range(1..=3);
        let p_s = rng.random_range(1..=3);
        let n_t = rng.random_range(p_t + 1..=32);
        let ns: Vec<usize> = (0..d).map(|_| rng.random_range(p_s..=[40, 12, 8][d - 1])).collect();
        let n = n_t * ns.iter().product::<usize>();
        if n > 2000 {
            continue;
        }
        count += 1;
        let prob = galerkin(p_t, n_t, p_s, &ns);
        let f: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let oracle = prob.operator.to_dense().lu().solve(&DVector::from_vec(f.clone())).unwrap();
        for m in EXACT {
            let u = prob.plan(m, &PlanOptions::default()).and_then(|p| p.apply(&f)).map_err(|e| e.to_string())?;
            let e = rel_diff(&u, oracle.as_slice());
            ensure!(e <= 1e-8, "{m} p_t={p_t} N_t={n_t} p_s={p_s} N_s={ns:?}: error {e:.2e}");
            worst = worst.max(e);
        }
    }
    Ok(format!("20 configurations, max error {worst:.2e}"))
}

fn c5_cross_method() -> Outcome {
    let mut worst = 0.0_f64;
    for p in 1..=3 {
        let prob = galerkin(p, 8, p, &[8, 8, 8]);
        let sols: Vec<Vec<f64>> = EXACT
            .iter()
            .map(|&m| prob.plan(m, &PlanOptions::default()).and_then(|pl| pl.apply(&prob.rhs)))
            .collect::<Result<_, Error>>()
            .map_err(|e| e.to_string())?;
        for i in 0..3 {
            for j in i + 1..3 {
                worst = worst.max(rel_diff(&sols[i], &sols[j]));
            }
        }
    }
    ensure!(worst <= 1e-8, "max pairwise difference {worst:.2e}");
    Ok(format!("max pairwise difference {worst:.2e}"))
}

fn c6_smw_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst = 0.0_f64;
    for inst in 0..100 {
        let n = rng.random_range(2..=16);
        let r = if inst % 2 == 0 { 1 } else { 2 };
        let diag: Vec<Complex64> = (0..n).map(|_| Complex64::new(0.0, rng.random_range(-20.0..20.0))).collect();
        let shift = rng.random_range(0.5..50.0);
        let mut c = || Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let uf = ComplexMatrix::from_fn(n, r, |_, _| c());
        let gu = ComplexMatrix::from_fn(r, n, |_, _| c());
        let y: Vec<Complex64> = (0..n).map(|_| c()).collect();
        let cap = smw_capacitance(&diag, shift, &uf, &gu, 0).map_err(|e| e.to_string())?;
        let x = smw_block_solve(&SmwBlock { diag: &diag, shift, uf: &uf, gu: &gu, capacitance: &cap }, &y)
            .map_err(|e| e.to_string())?;
        let mut dense = &uf * &gu;
        for (j, d) in diag.iter().enumerate() {
            dense[(j, j)] += d + shift;
        }
        let inv = dense.try_inverse().ok_or("dense oracle singular")?;
        let oracle = inv * DVector::from_vec(y);
        let err = x.iter().zip(oracle.iter()).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt() / oracle.norm();
        worst = worst.max(err);
    }
    ensure!(worst <= 1e-11, "max error {worst:.2e}");
    Ok(format!("100 instances, max error {worst:.2e}"))
}

fn c7_arrowhead_reconstruction() -> Outcome {
    let (a, m) = time_pair(3, 16);
    let f = ArrowheadFactors::build(&a, &m).map_err(|e| e.to_string())?;
    let pairs: Vec<_> = (0..2)
        .map(|_| {
            let s = dirichlet_space(2, 8).unwrap();
            (assemble_1d(&s, MatrixKind::Stiffness).to_dense(), assemble_1d(&s, MatrixKind::Mass).to_dense())
        })
        .collect();
    let space = fast_diag_space(&pairs, &KronTerm::laplacian(2)).map_err(|e| e.to_string())?;
    let delta = f.dense();
    let mut worst = 0.0_f64;
    for (i, &lam) in space.lambda().iter().enumerate() {
        let block = f.block(lam, i).map_err(|e| e.to_string())?;
        let (l, u) = block.dense_factors();
        let target = &delta + ComplexMatrix::identity(16, 16) * Complex64::new(lam, 0.0);
        worst = worst.max((l * u - &target).norm() / target.norm());
    }
    ensure!(worst <= 1e-13, "max reconstruction error {worst:.2e}");
    Ok(format!("{} shifts, max error {worst:.2e}", space.lambda().len()))
}

fn c8_fast_diag() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst = 0.0_f64;
    for d in [2, 3] {
        let pairs: Vec<_> = (0..d)
            .map(|l| {
                let s = dirichlet_space(1 + l, 6).unwrap();
                (assemble_1d(&s, MatrixKind::Stiffness).to_dense(), assemble_1d(&s, MatrixKind::Mass).to_dense())
            })
            .collect();
        let space = fast_diag_space(&pairs, &KronTerm::laplacian(d)).map_err(|e| e.to_string())?;
        let ops = heatkron::solvers::SpaceMatrices::laplacian(pairs);
        let n = space.dim();
        for _ in 0..20 {
            let x: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let ux = space.apply_u(&x).unwrap();
            let mx = space.apply_ut(&ops.apply_m(&ux).unwrap()).unwrap();
            let ax = space.apply_ut(&ops.apply_a(&ux).unwrap()).unwrap();
            let lx: Vec<f64> = x.iter().zip(space.lambda()).map(|(v, l)| v * l).collect();
            worst = worst.max(rel_diff(&mx, &x)).max(rel_diff(&ax, &lx));
        }
    }
    ensure!(worst <= 1e-10, "max probe error {worst:.2e}");
    Ok(format!("max probe error {worst:.2e}"))
}

fn c9_fd_time_stepping() -> Outcome {
    let partition = TimePartition::geometric(1.0, 32, 1.2).map_err(|e| e.to_string())?;
    let space = SplineSpace::with_dofs(1, 16, 0.0, 1.0, Constraint::ZeroAtBothEnds).unwrap();
    let prob = SpaceTimeProblem::implicit_euler_cartesian(partition.clone(), vec![space.clone()], 1.0).unwrap();
    let u = prob
        .plan(Method::Dt, &PlanOptions::default())
        .and_then(|p| p.apply(&prob.rhs))
        .map_err(|e| e.to_string())?;
    let ns = prob.n_s();
    let a_s = prob.operator.space().dense_a();
    let m_s = prob.operator.space().dense_m();
    let mut prev = DVector::zeros(ns);
    let mut oracle = Vec::new();
    for (n, &tau) in partition.taus().iter().enumerate() {
        let rhs = DVector::from_column_slice(&prob.rhs[n * ns..(n + 1) * ns]) + &m_s * &prev / tau;
        let next = (&m_s / tau + &a_s).lu().solve(&rhs).unwrap();
        oracle.extend(next.iter());
        prev = next;
    }
    let err = rel_diff(&u, &oracle);
    ensure!(err <= 1e-8, "DT vs implicit Euler {err:.2e}");
    let uniform = SpaceTimeProblem::implicit_euler_cartesian(TimePartition::uniform(1.0, 32).unwrap(), vec![space], 1.0)
        .unwrap();
    match uniform.plan(Method::Dt, &PlanOptions::default()) {
        Err(Error::DefectivePencil { cond }) => Ok(format!("error {err:.2e}; uniform steps: defective (cond {cond:.1e})")),
        other => Err(format!("uniform partition did not raise a defective pencil: {:?}", other.map(|_| ()))),
    }
}

fn c10_preconditioner() -> Outcome {
    let mut report = Vec::new();
    let mut soft_ok = true;
    for (p, target) in [(1usize, 37.0), (2, 38.0)] {
        let time = SplineSpace::uniform(p, 8, 0.0, 1.0, Constraint::ZeroAtLeft).unwrap();
        let s = SplineSpace::uniform(p, 8, 0.0, 1.0, Constraint::ZeroAtBothEnds).unwrap();
        let mp = manufactured_problem(GeometryMap::RotatedQuarterAnnulus3d, time, vec![s.clone(), s.clone(), s])
            .map_err(|e| e.to_string())?;
        let mut counts = Vec::new();
        for m in EXACT {
            let pc = mp.preconditioner(m, &PlanOptions::default()).map_err(|e| e.to_string())?;
            let r = gmres(&mp.problem.operator, &pc, &mp.problem.rhs, 1e-8, 500).map_err(|e| e.to_string())?;
            ensure!(r.converged, "p={p} {m}: GMRES did not converge");
            counts.push(r.iterations);
        }
        ensure!(counts.iter().all(|&c| c == counts[0]), "p={p}: iteration counts differ {counts:?}");
        let c = counts[0] as f64;
        soft_ok &= (c - target).abs() <= 0.3 * target;
        report.push(format!("p={p}: {} (reference {target})", counts[0]));
    }
    ensure!(soft_ok, "counts outside the ±30% band: {}", report.join("; "));
    Ok(report.join("; "))
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let cov: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let var: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    cov / var
}

fn c11_complexity() -> Outcome {
    let ladder = [4usize, 6, 8, 10];
    let mut report = Vec::new();
    for m in EXACT {
        let mut ns = Vec::new();
        let mut ops = Vec::new();
        for &n in &ladder {
            let prob = galerkin(2, n, 2, &[n, n, n]);
            let (_, o) = prob
                .plan(m, &PlanOptions::default())
                .and_then(|p| p.apply_instrumented(&prob.rhs))
                .map_err(|e| e.to_string())?;
            ns.push(prob.dim() as f64);
            ops.push(o.block as f64);
        }
        let s = slope(&ns, &ops);
        ensure!((s - 1.0).abs() <= 0.15, "{m}: block-op slope {s:.3}");
        report.push(format!("{m} slope {s:.3}"));
    }
    for m in [Method::Ar, Method::Dt, Method::Lr] {
        let setup = |n_t: usize| {
            galerkin(2, n_t, 2, &[4, 4, 4])
                .plan(m, &PlanOptions { low_rank: LowRank::Rank1 })
                .map(|p| p.setup_ops().total() as f64)
        };
        let growth = setup(32).map_err(|e| e.to_string())? / setup(16).map_err(|e| e.to_string())?;
        ensure!(growth >= 4.0, "{m}: setup growth {growth:.2} under N_t doubling");
        report.push(format!("{m} setup x{growth:.2}"));
    }
    Ok(report.join("; "))
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("AR conditioning", c1_ar_conditioning, 30),
        ("DT instability", c2_dt_instability, 60),
        ("sqrt(kappa) identity", c3_sqrt_identity, 60),
        ("oracle equivalence", c4_oracle_equivalence, 60),
        ("cross-method agreement", c5_cross_method, 60),
        ("SMW block oracle", c6_smw_oracle, 5),
        ("arrowhead reconstruction", c7_arrowhead_reconstruction, 5),
        ("fast diagonalization", c8_fast_diag, 5),
        ("FD-DT vs time stepping", c9_fd_time_stepping, 5),
        ("preconditioner parity and counts", c10_preconditioner, 600),
        ("complexity counters", c11_complexity, 300),
    ];
    let mut failed = 0;
    for (i, (name, run, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(msg) if elapsed > Duration::from_secs(*budget) => Err(format!("{msg}; exceeded {budget} s budget")),
            o => o,
        };
        match outcome {
            Ok(msg) => println!("PASS {:>2} {name}: {msg} [{:.2?}]", i + 1, elapsed),
            Err(msg) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {msg} [{:.2?}]", i + 1, elapsed);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

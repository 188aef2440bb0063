use heatkron::krylov::{assemble_mapped, gmres, manufactured_problem, precondition_apply, GeometryMap, ManufacturedProblem};
use heatkron::problem::time_space;
use heatkron::solvers::{LinearOperator, Method, PlanOptions};
use heatkron::spline::{Constraint, SplineSpace};
use heatkron::tensor::DenseMatrix;
use nalgebra::DVector;

const EXACT: [Method; 3] = [Method::Lu, Method::Ar, Method::Lr];

fn space(p: usize, n_el: usize) -> SplineSpace {
    SplineSpace::uniform(p, n_el, 0.0, 1.0, Constraint::ZeroAtBothEnds).unwrap()
}

fn problem(g: GeometryMap, p: usize, n_el: usize) -> ManufacturedProblem {
    let time = SplineSpace::uniform(p, n_el, 0.0, 1.0, Constraint::ZeroAtLeft).unwrap();
    manufactured_problem(g, time, vec![space(p, n_el); g.dim()]).unwrap()
}

fn iterations(mp: &ManufacturedProblem, method: Method) -> heatkron::krylov::GmresResult {
    let pc = mp.preconditioner(method, &PlanOptions::default()).unwrap();
    gmres(&mp.problem.operator, &pc, &mp.problem.rhs, 1e-8, 300).unwrap()
}

#[test]
fn exact_preconditioner_on_identity_geometry() {
    for g in [GeometryMap::UnitSquare, GeometryMap::UnitCube] {
        let mp = problem(g, 2, 4);
        for m in EXACT {
            let r = iterations(&mp, m);
            assert!(r.converged && r.iterations <= 2, "{g} {m}: {}", r.iterations);
        }
    }
}

#[test]
fn methods_give_identical_iteration_histories() {
    let mp = problem(GeometryMap::QuarterAnnulus2d, 2, 6);
    let runs: Vec<_> = EXACT.iter().map(|&m| iterations(&mp, m)).collect();
    for r in &runs[1..] {
        assert_eq!(r.iterations, runs[0].iterations);
        for (a, b) in r.history.iter().zip(&runs[0].history) {
            assert!((a - b).abs() <= 1e-6 * b);
        }
    }
}

#[test]
fn precondition_apply_inverts_parametric_operator() {
    let mp = problem(GeometryMap::QuarterAnnulus2d, 1, 4);
    let pc = mp.preconditioner(Method::Ar, &PlanOptions::default()).unwrap();
    let hat = heatkron::solvers::SpaceTimeOperator::new(
        mp.problem.operator.a_t().clone(),
        mp.problem.operator.m_t().clone(),
        mp.parametric.clone(),
    )
    .unwrap();
    let x: Vec<f64> = (0..hat.dim()).map(|i| (i as f64 * 0.37).cos()).collect();
    let y = precondition_apply(&pc, &hat.apply(&x).unwrap()).unwrap();
    let err: f64 = x.iter().zip(&y).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
    assert!(err <= 1e-10 * (x.len() as f64).sqrt());
}

#[test]
fn error_decreases_under_refinement() {
    let errs: Vec<f64> = [2, 4, 8]
        .iter()
        .map(|&n| {
            let mp = problem(GeometryMap::QuarterAnnulus2d, 1, n);
            let r = iterations(&mp, Method::Lu);
            assert!(r.converged);
            mp.l2_error(&r.x).unwrap()
        })
        .collect();
    assert!(errs[0] > errs[1] && errs[1] > errs[2], "{errs:?}");
}

#[test]
fn iteration_growth_is_moderate() {
    let a = iterations(&problem(GeometryMap::QuarterAnnulus2d, 1, 8), Method::Lu).iterations;
    let b = iterations(&problem(GeometryMap::QuarterAnnulus2d, 1, 16), Method::Lu).iterations;
    assert!(b >= a && (b as f64) <= 1.6 * a as f64, "{a} -> {b}");
}

fn mass_interval(n_el: usize) -> (f64, f64) {
    let s = vec![space(1, n_el); 2];
    let mapped = assemble_mapped(GeometryMap::QuarterAnnulus2d, &s).unwrap();
    let hat = assemble_mapped(GeometryMap::UnitSquare, &s).unwrap();
    let (m, mh) = (mapped.m.to_dense(), hat.m.to_dense());
    let l = mh.cholesky().unwrap().l();
    let li = l.clone().try_inverse().unwrap();
    let c: DenseMatrix = &li * m * li.transpose();
    let ev = c.symmetric_eigen().eigenvalues;
    (ev.min(), ev.max())
}

#[test]
fn mass_matrices_are_spectrally_equivalent() {
    use std::f64::consts::{FRAC_PI_2, PI};
    let (lo1, hi1) = mass_interval(16);
    let (lo2, hi2) = mass_interval(32);
    // |det J| ranges over [π/2, π], which bounds every level
    for v in [lo1, hi1, lo2, hi2] {
        assert!((FRAC_PI_2 - 1e-12..=PI + 1e-12).contains(&v));
    }
    let growth = (hi2 / lo2) / (hi1 / lo1);
    assert!((1.0..=1.05).contains(&growth), "{growth}");
}

#[test]
fn patch_test_reproduces_linear_fields() {
    for g in [GeometryMap::UnitSquare, GeometryMap::UnitCube] {
        for p in [1, 2] {
            let spaces = vec![space(p, 3); g.dim()];
            let mats = assemble_mapped(g, &spaces).unwrap();
            let lin = |x: &[f64]| 1.0 + x.iter().enumerate().map(|(k, v)| (k as f64 + 2.0) * v).sum::<f64>();
            // Greville interpolation is exact for linear functions
            let coef = |full: usize| {
                let mut r = full;
                let x: Vec<f64> = spaces
                    .iter()
                    .map(|s| {
                        let gv = s.greville()[r % s.n_full()];
                        r /= s.n_full();
                        gv
                    })
                    .collect();
                lin(&g.eval(&x).0)
            };
            let ub: Vec<f64> = mats.boundary.iter().map(|&f| coef(f)).collect();
            let rhs: Vec<f64> = mats.a_boundary.matvec(&ub).unwrap().iter().map(|v| -v).collect();
            let u = mats.a.to_dense().lu().solve(&DVector::from_vec(rhs)).unwrap();
            for (i, &f) in mats.interior.iter().enumerate() {
                assert!((u[i] - coef(f)).abs() <= 1e-9, "{g} p={p}");
            }
        }
    }
}

#[test]
fn time_space_helper_matches_element_count() {
    // with the first function removed, N_t elements carry N_t + p - 1 dofs
    let s = SplineSpace::uniform(2, 8, 0.0, 1.0, Constraint::ZeroAtLeft).unwrap();
    assert_eq!(s.n_funcs(), time_space(2, 9).unwrap().n_funcs());
}

use std::process::{Command, Output};

fn heatkron(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_heatkron")).args(args).output().expect("binary runs")
}

fn rows(out: &Output) -> Vec<Vec<String>> {
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    let mut r = csv::Reader::from_reader(text.as_bytes());
    r.records().map(|rec| rec.unwrap().iter().map(str::to_string).collect()).collect()
}

fn num(s: &str) -> f64 {
    s.parse().unwrap_or_else(|_| panic!("not a number: {s}"))
}

#[test]
fn cond_table_ar_matches_reference_values() {
    let out = heatkron(&["cond-table", "--mode", "ar", "--nt", "32,64"]);
    assert_eq!(out.status.code(), Some(0));
    let header = String::from_utf8_lossy(&out.stdout).lines().next().unwrap().to_string();
    assert_eq!(header, "mode,n_t,p_t,kappa2");
    let target = [2.0, 3.3, 5.2, 8.3, 13.0];
    let r = rows(&out);
    assert_eq!(r.len(), 10);
    for row in &r {
        let p: usize = row[2].parse().unwrap();
        let k = num(&row[3]);
        assert!((k - target[p - 1]).abs() <= 0.1 * target[p - 1], "{row:?}");
    }
    for p in 0..5 {
        let (a, b) = (num(&r[p][3]), num(&r[p + 5][3]));
        assert!((a - b).abs() / a < 0.05);
    }
}

#[test]
fn cond_table_dt_grows_and_stays_near_reference() {
    let out = heatkron(&["cond-table", "--mode", "dt", "--pt", "3", "--nt", "32,64"]);
    let r = rows(&out);
    let (a, b) = (num(&r[0][3]), num(&r[1][3]));
    assert!((2.7e3..=2.7e5).contains(&a));
    assert!(b > a);
}

#[test]
fn solve_agrees_across_methods_and_with_dense_oracle() {
    let out = heatkron(&["solve", "--methods", "lu,ar,lr", "--nt", "3", "--ns", "3", "--pt", "2", "--ps", "2"]);
    assert_eq!(out.status.code(), Some(0));
    for row in rows(&out) {
        assert_eq!(row[7], "ok");
        assert!(num(&row[10]) <= 1e-9, "residual {row:?}");
        assert!(num(&row[11]) <= 1e-8, "cross {row:?}");
        assert!(num(&row[12]) <= 1e-9, "oracle {row:?}");
    }
}

#[test]
fn solve_reports_defective_pencil_per_method() {
    let out = heatkron(&["solve", "--time", "fd-uniform", "--geometry", "unit-square", "--nt", "8", "--ns", "6"]);
    assert_eq!(out.status.code(), Some(0));
    let r = rows(&out);
    let dt = r.iter().find(|row| row[6] == "dt").unwrap();
    assert!(dt[7].starts_with("defective pencil"), "{dt:?}");
    let lu = r.iter().find(|row| row[6] == "lu").unwrap();
    assert_eq!(lu[7], "ok");
}

#[test]
fn precond_identity_geometry_needs_at_most_two_iterations() {
    let out = heatkron(&["precond", "--geometry", "unit-cube", "--ps", "1", "--nt", "4"]);
    assert_eq!(out.status.code(), Some(0));
    for row in rows(&out) {
        assert!(row[5].parse::<usize>().unwrap() <= 2);
    }
}

#[test]
fn precond_parity_on_rotated_annulus() {
    let out = heatkron(&["precond", "--ps", "1", "--nt", "8"]);
    assert_eq!(out.status.code(), Some(0));
    let iters: Vec<usize> = rows(&out).iter().map(|r| r[5].parse().unwrap()).collect();
    assert_eq!(iters.len(), 3);
    assert!(iters.iter().all(|&k| k == iters[0]));
    assert!((26..=48).contains(&iters[0]), "{iters:?}");
}

#[test]
fn verify_passes_and_corruption_fails() {
    assert_eq!(heatkron(&["verify"]).status.code(), Some(0));
    let bad = heatkron(&["verify", "--corrupt-band"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(rows(&bad).iter().any(|r| r[0] == "dense-oracle" && r[1] == "fail"));
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(heatkron(&["verify", "--methods", ""]).status.code(), Some(2));
    assert_eq!(heatkron(&["solve", "--geometry", "quarter-annulus-2d"]).status.code(), Some(2));
    assert_eq!(heatkron(&["scaling", "--ns", "4,6"]).status.code(), Some(2));
    assert_eq!(heatkron(&["solve", "--methods", "qr"]).status.code(), Some(2));
}

#[test]
fn output_is_deterministic_apart_from_wall_time() {
    let without_time = |o: Output| -> Vec<Vec<String>> {
        rows(&o)
            .into_iter()
            .map(|r| r.into_iter().enumerate().filter(|(i, _)| *i != 4 && *i != 5).map(|(_, c)| c).collect())
            .collect()
    };
    let a = heatkron(&["scaling", "--methods", "lu,ar"]);
    let b = heatkron(&["scaling", "--methods", "lu,ar"]);
    assert_eq!(without_time(a), without_time(b));
}

#[test]
fn config_file_and_output_path() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    let csv_path = dir.path().join("out.csv");
    std::fs::write(&cfg, format!("pt=1,2\nnt=32\noutput={}\n", csv_path.display())).unwrap();
    let out = heatkron(&["cond-table", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&csv_path).unwrap();
    assert_eq!(text.lines().count(), 3);
}

use std::path::Path;
use std::process::{Command, Output};

use ncpot::circle::DiscSpec;
use ncpot::curvature::MetricField;
use ncpot::io::{read_json, write_json, FieldJson, LaurentJson, PolynomialJson};
use ncpot::linalg::{c64, Hermitian};
use ncpot::poly::{MatrixLaurent, MatrixPolynomial};

fn ncpot(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ncpot"))
        .args(args)
        .env("NCPOT_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn path(p: &Path) -> &str {
    p.to_str().expect("utf-8 temp path")
}

fn dual_field(dir: &Path) -> std::path::PathBuf {
    let terms = vec![
        MatrixPolynomial::scalar(&[c64(1.0, 0.0)]).unwrap(),
        MatrixPolynomial::scalar(&[c64(0.0, 0.0), c64(1.0, 0.0)]).unwrap(),
    ];
    let f = MetricField::dual_flat_sum(terms, DiscSpec::unit()).unwrap();
    let p = dir.join("dual.json");
    write_json(&p, &FieldJson::from_field(&f)).unwrap();
    p
}

#[test]
fn factor_constant_symbol() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("f.json");
    let output = dir.path().join("h.json");
    let f = MatrixLaurent::constant(&Hermitian::from_real_diagonal(&[4.0, 1.0]));
    write_json(&input, &LaurentJson::from_laurent(&f)).unwrap();
    let out = ncpot(&["factor", "--in", path(&input), "--out", path(&output)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let h = read_json::<PolynomialJson>(&output).unwrap().to_polynomial().unwrap();
    let h0 = &h.coeffs()[0];
    assert!((h0[(0, 0)] - c64(2.0, 0.0)).norm() < 1e-12);
    assert!((h0[(1, 1)] - c64(1.0, 0.0)).norm() < 1e-12);
    assert!(h0[(0, 1)].norm() < 1e-12);
}

#[test]
fn indefinite_symbol_is_numerical_failure() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("f.json");
    let f = MatrixLaurent::constant(&Hermitian::from_real_diagonal(&[1.0, -1.0]));
    write_json(&input, &LaurentJson::from_laurent(&f)).unwrap();
    let out = ncpot(&["factor", "--in", path(&input), "--out", path(&dir.path().join("h.json"))]);
    assert_eq!(out.status.code(), Some(3));
    let diag: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(diag["error"], "not_strictly_positive");
}

#[test]
fn malformed_input_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("bad.json");
    std::fs::write(&input, "{\"dim\": 1}").unwrap();
    let out = ncpot(&["factor", "--in", path(&input), "--out", path(&dir.path().join("h.json"))]);
    assert_eq!(out.status.code(), Some(2));
    let out = ncpot(&["certify", "--field", path(&input), "--mode", "seminegative"]);
    let diag: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_ne!(diag["error"], "usage");
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn certify_dual_field_fails_with_witness() {
    let dir = tempfile::tempdir().unwrap();
    let field = dual_field(dir.path());
    let out = ncpot(&["certify", "--field", path(&field), "--mode", "seminegative", "--tol", "1e-9"]);
    assert_eq!(out.status.code(), Some(1));
    let rep: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(rep["passed"], false);
    assert_eq!(rep["witness"]["kind"], "disc");
    let out = ncpot(&["certify", "--field", path(&field), "--mode", "semipositive"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn curvature_expectation() {
    let dir = tempfile::tempdir().unwrap();
    let field = dual_field(dir.path());
    let out = ncpot(&["curvature", "--field", path(&field), "--grid", "8", "--expect", "semipositive"]);
    assert_eq!(out.status.code(), Some(0));
    let out = ncpot(&["curvature", "--field", path(&field), "--grid", "8", "--expect", "seminegative"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn harnack_csv_row() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("family.csv");
    let out = ncpot(&["harnack", "--z0", "0.5", "--kmax", "2", "--dim", "16", "--out", path(&csv)]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&csv).unwrap();
    let row: Vec<&str> = text.lines().nth(2).unwrap().split(',').collect();
    assert_eq!(row[0], "2");
    assert_eq!(row[2].parse::<f64>().unwrap(), 625.0);
    assert_eq!(row[3], "25");
}

#[test]
fn dirichlet_round_trip_and_eval() {
    let dir = tempfile::tempdir().unwrap();
    let samples = ncpot::circle::BoundarySamples::from_fn(DiscSpec::unit(), 32, |w| {
        Hermitian::from_real_diagonal(&[1.25 + w.re])
    })
    .unwrap();
    let b = dir.path().join("b.json");
    write_json(&b, &ncpot::io::BoundaryJson::from_samples(&samples)).unwrap();
    let pts = dir.path().join("pts.json");
    std::fs::write(&pts, "[[0.0, 0.0], [0.5, 0.0]]").unwrap();
    let flat = dir.path().join("flat.json");
    let out = ncpot(&["dirichlet", "--boundary", path(&b), "--degree", "8", "--eval", path(&pts), "--out", path(&flat)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let p = v["values"][1]["P"]["entries"][0][0][0].as_f64().unwrap();
    assert!((p - 1.5625).abs() < 1e-10);
    let metric = read_json::<ncpot::io::FlatMetricJson>(&flat).unwrap().to_metric().unwrap();
    assert!((metric.evaluate(c64(0.0, 0.0)).unwrap().as_matrix()[(0, 0)].re - 1.0).abs() < 1e-10);
}

#[test]
fn selftest_is_deterministic() {
    let a = ncpot(&["selftest", "--seed", "3"]);
    let b = ncpot(&["selftest", "--seed", "3"]);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stdout));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn bad_thread_count_is_input_error() {
    let out = Command::new(env!("CARGO_BIN_EXE_ncpot"))
        .args(["harnack", "--kmax", "1", "--dim", "4"])
        .env("NCPOT_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

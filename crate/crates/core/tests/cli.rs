//! The `kry` binary end to end.

mod common;

use std::path::Path;
use std::process::{Command, Output};

use augdef::operators::{write_matrix_market, CsrMatrix};
use augdef::random;
use serde_json::Value;

fn kry(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kry")).args(args).current_dir(dir).env("KRY_LOG", "quiet").output().unwrap()
}

fn json_line(out: &Output) -> Value {
    let text = String::from_utf8_lossy(&out.stdout);
    serde_json::from_str(text.lines().last().unwrap()).unwrap()
}

#[test]
fn cg_on_identity_takes_one_iteration() {
    let dir = tempfile::tempdir().unwrap();
    write_matrix_market(&CsrMatrix::identity(10), dir.path().join("eye.mtx")).unwrap();
    let out = kry(&["--matrix", "eye.mtx", "--method", "cg", "--report", "r.json", "--history", "h.csv"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let rep: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("r.json")).unwrap()).unwrap();
    assert_eq!(rep["iterations"], 1);
    assert_eq!(rep["converged"], true);
    assert_eq!(rep["n"], 10);
    for key in ["method", "cycles", "final_relres", "breakdown_flag", "wall_time_ms"] {
        assert!(rep.get(key).is_some(), "missing {key}");
    }
    let csv = std::fs::read_to_string(dir.path().join("h.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "iteration,cycle,relres,event");
    assert_eq!(csv.lines().count(), 3);
}

#[test]
fn histories_are_bit_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let args = |h: &'static str| {
        vec!["--matrix", "gen:clustered:80", "--method", "gmres-dr", "--rhs", "random", "--restart", "10", "--history", h]
    };
    assert_eq!(kry(&args("a.csv"), dir.path()).status.code(), Some(0));
    assert_eq!(kry(&args("b.csv"), dir.path()).status.code(), Some(0));
    let a = std::fs::read(dir.path().join("a.csv")).unwrap();
    let b = std::fs::read(dir.path().join("b.csv")).unwrap();
    assert_eq!(a, b);
    // seventeen significant digits round-trip
    let text = String::from_utf8(a).unwrap();
    let rel = text.lines().nth(1).unwrap().split(',').nth(2).unwrap();
    assert_eq!(rel, "1.0000000000000000e0");
}

#[test]
fn malformed_matrix_reports_the_line() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.mtx"), "%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1.0\n2 x 3.0\n").unwrap();
    let out = kry(&["--matrix", "bad.mtx"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 4"), "{err}");
}

#[test]
fn usage_errors_exit_64() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(kry(&["--matrix", "gen:diag:4", "--method", "bicgstab"], dir.path()).status.code(), Some(64));
    assert_eq!(kry(&["--bogus"], dir.path()).status.code(), Some(64));
    assert_eq!(kry(&["--help"], dir.path()).status.code(), Some(0));
}

#[test]
fn non_convergence_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = kry(&["--matrix", "gen:laplace1d:200", "--method", "gmres", "--restart", "5", "--maxiter", "10"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json_line(&out)["converged"], false);
}

#[test]
fn compare_shows_fewer_iterations_for_gmres_dr() {
    let dir = tempfile::tempdir().unwrap();
    let out = kry(&["compare", "--matrix", "gen:clustered:200", "--methods", "gmres,gmres-dr", "--rhs", "random", "--report", "c.json"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let rows: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("c.json")).unwrap()).unwrap();
    let plain = rows[0]["iterations"].as_u64().unwrap();
    let dr = rows[1]["iterations"].as_u64().unwrap();
    assert!(dr < plain, "{dr} vs {plain}");
}

#[test]
fn spectrum_with_deflation_space() {
    let dir = tempfile::tempdir().unwrap();
    let out = kry(&["spectrum", "--matrix", "gen:clustered-hpd:100", "--deflation-space", "auto-eig:2"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let rep: Value = serde_json::from_str(&String::from_utf8_lossy(&out.stdout)).unwrap();
    assert!((rep["kappa"].as_f64().unwrap() - 200.0).abs() < 1e-6);
    assert!((rep["kappa_eff"].as_f64().unwrap() - 2.0).abs() < 1e-8);
}

#[test]
fn spectrum_kappa_matches_dense_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let a = random::hpd_matrix(&mut random::seeded(42), 100, 1.0, 100.0);
    let csr = CsrMatrix::from_dense(&a).unwrap();
    write_matrix_market(&csr, dir.path().join("h.mtx")).unwrap();
    let out = kry(&["spectrum", "--matrix", "h.mtx"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let rep: Value = serde_json::from_str(&String::from_utf8_lossy(&out.stdout)).unwrap();
    // the file stores 17 significant digits, so the oracle reads the same matrix back
    let back = augdef::operators::read_matrix_market(dir.path().join("h.mtx")).unwrap();
    let kappa = common::cond2(&back);
    assert!((rep["kappa"].as_f64().unwrap() - kappa).abs() <= 1e-8 * kappa);
}

#[test]
fn oversized_spectrum_is_refused() {
    let dir = tempfile::tempdir().unwrap();
    let out = kry(&["spectrum", "--matrix", "gen:laplace1d:2001"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());
}

#[test]
fn sequence_manifest_recycles_between_systems() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = r#"
method = "gmres-dr"
restart = 20
recycle_dim = 4
strategy = "harmonic-dr"

[[system]]
matrix = "gen:clustered:120"
rhs = "random:7"

[[system]]
matrix = "gen:clustered:120"
rhs = "random:7"
"#;
    std::fs::write(dir.path().join("seq.toml"), manifest).unwrap();
    let out = kry(&["--sequence-manifest", "seq.toml", "--history", "h.csv", "--report", "r.json"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("h.0.csv").exists() && dir.path().join("h.1.csv").exists());
    let rows: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("r.json")).unwrap()).unwrap();
    let first = rows[0]["iterations"].as_u64().unwrap();
    let second = rows[1]["iterations"].as_u64().unwrap();
    assert!(second < first, "{second} vs {first}");
    assert_eq!(rows[1]["recycled_dim"], 4);
}

#[test]
fn manifest_errors_carry_line_numbers() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("seq.toml"), "method = \"gmres\"\nrestart = \"ten\"\n[[system]]\nmatrix = \"gen:diag:4\"\n").unwrap();
    let out = kry(&["--sequence-manifest", "seq.toml"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

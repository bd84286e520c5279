use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn qbounds(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qbounds"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn model(dir: &Path, name: &str, json: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, json).unwrap();
    path
}

fn qubit(dir: &Path) -> PathBuf {
    model(
        dir,
        "qubit.json",
        r#"{"type":"qubit","E":10.0,"nu":1,"prior":{"mean":0.0,"sigma":0.1}}"#,
    )
}

/// Values in the single data row after the header.
fn single_row(stdout: &[u8]) -> Vec<(String, f64)> {
    let text = String::from_utf8(stdout.to_vec()).unwrap();
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header: Vec<String> = lines.next().unwrap().split(',').map(str::to_string).collect();
    let row: Vec<f64> = lines.next().unwrap().split(',').map(|v| v.parse().unwrap()).collect();
    header.into_iter().zip(row).collect()
}

fn value(stdout: &[u8], column: &str) -> f64 {
    single_row(stdout).into_iter().find(|(c, _)| c == column).unwrap().1
}

#[test]
fn qubit_closed_forms() {
    let dir = tempfile::tempdir().unwrap();
    let m = qubit(dir.path());
    let m = m.to_str().unwrap();
    let out = qbounds(&["bound", "--model", m, "--method", "mmse"]);
    assert!(out.status.success());
    assert!((value(&out.stdout, "mmse") - 0.0063212).abs() < 5e-8);
    let out = qbounds(&["bound", "--model", m, "--method", "qcrb"]);
    assert!((value(&out.stdout, "qcrb") - 0.005).abs() < 1e-15);
}

#[test]
fn generic_ww_matches_analytic_qwwb() {
    let dir = tempfile::tempdir().unwrap();
    let m = qubit(dir.path());
    let m = m.to_str().unwrap();
    let grid = qbounds(&[
        "bound",
        "--model",
        m,
        "--method",
        "generic-ww",
        "--h",
        "0.2",
        "--s",
        "0.5",
    ]);
    assert!(grid.status.success(), "{}", String::from_utf8_lossy(&grid.stderr));
    let analytic = qbounds(&["bound", "--model", m, "--method", "qwwb", "--h", "0.2", "--s", "0.5"]);
    let (g, a) = (value(&grid.stdout, "generic_ww"), value(&analytic.stdout, "qwwb"));
    assert!(((g - a) / a).abs() < 1e-4, "{g} vs {a}");
    assert_eq!(value(&grid.stdout, "max_snap_error"), 0.0);
}

#[test]
fn generic_ww_records_snapping() {
    let dir = tempfile::tempdir().unwrap();
    let m = qubit(dir.path());
    // dx = 1.6 / 2000 = 8e-4, so 0.2003 is not a grid multiple
    let out = qbounds(&[
        "bound",
        "--model",
        m.to_str().unwrap(),
        "--method",
        "generic-ww",
        "--h",
        "0.2003",
    ]);
    assert!(out.status.success());
    let snap = value(&out.stdout, "max_snap_error");
    assert!(snap > 0.0 && snap <= 4e-4 + 1e-12, "{snap}");
}

#[test]
fn sweeps_keep_order() {
    let dir = tempfile::tempdir().unwrap();
    let m = qubit(dir.path());
    let out = qbounds(&[
        "bound",
        "--model",
        m.to_str().unwrap(),
        "--method",
        "qcrb",
        "--sweep",
        "E=1,5,10,20,50",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<Vec<f64>> = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 5);
    for r in &rows {
        assert!((r[1] - 1.0 / (100.0 + r[0] * r[0])).abs() < 1e-15);
    }
}

#[test]
fn capability_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let bosonic = model(
        dir.path(),
        "bosonic.json",
        r#"{"type":"bosonic","E":{"epsilon":0.1,"M":10},"nu":3,"prior":{"sigma":0.5}}"#,
    );
    let out = qbounds(&["bound", "--model", bosonic.to_str().unwrap(), "--method", "mmse"]);
    assert_eq!(out.status.code(), Some(3));

    let tabulated = model(
        dir.path(),
        "tab.json",
        r#"{"type":"qubit","E":10.0,"prior":{"grid":[-0.3,-0.2,-0.1,0.0,0.1,0.2,0.3],"weights":[0,0.125,0.25,0.25,0.25,0.125,0]}}"#,
    );
    for method in ["qcrb", "qzzb", "mmse"] {
        let out = qbounds(&["bound", "--model", tabulated.to_str().unwrap(), "--method", method]);
        assert_eq!(out.status.code(), Some(3), "{method}");
    }
    let out = qbounds(&[
        "bound",
        "--model",
        tabulated.to_str().unwrap(),
        "--method",
        "generic-ww",
        "--h",
        "0.1",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn config_errors_exit_4() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("absent.json");
    let out = qbounds(&["bound", "--model", missing.to_str().unwrap(), "--method", "qcrb"]);
    assert_eq!(out.status.code(), Some(4));

    let broken = model(
        dir.path(),
        "broken.json",
        r#"{"type":"qubit","E":1.0,"prior":{"sigma":0.1},"x":2}"#,
    );
    let out = qbounds(&["bound", "--model", broken.to_str().unwrap(), "--method", "qcrb"]);
    assert_eq!(out.status.code(), Some(4));

    let out = qbounds(&[
        "figure1",
        "--out",
        dir.path().join("no/such/dir/f.csv").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(4));

    let out = qbounds(&["figure1", "--energies", "5,1"]);
    assert_eq!(out.status.code(), Some(4));

    let unnormalized = model(
        dir.path(),
        "weights.json",
        r#"{"type":"qubit","E":10.0,"prior":{"grid":[-0.1,0.0,0.1],"weights":[1,2,1]}}"#,
    );
    let out = qbounds(&[
        "bound",
        "--model",
        unnormalized.to_str().unwrap(),
        "--method",
        "generic-ww",
        "--h",
        "0.1",
    ]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let out = qbounds(&["figure2", "--nu", "1,2,5,10", "--out", p.to_str().unwrap()]);
        assert!(out.status.success());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(
        std::fs::read(dir.path().join("a_fidelity.csv")).unwrap(),
        std::fs::read(dir.path().join("b_fidelity.csv")).unwrap()
    );
}

#[test]
fn figure1_csv_layout() {
    let out = qbounds(&["figure1", "--normalized", "--energies", "1e-9,1,10"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("# command=figure1\n"));
    assert!(!text.contains('\r'));
    let body: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(body[0], "E,mmse,qwwb,qzzb,qcrb");
    // no signal: every bound sits at the prior variance
    let first: Vec<f64> = body[1].split(',').map(|v| v.parse().unwrap()).collect();
    for v in &first[1..] {
        assert!((v - 1.0).abs() < 1e-4, "{v}");
    }
    for cell in body[2].split(',') {
        let mantissa = cell.trim_start_matches('-').split('e').next().unwrap();
        assert_eq!(mantissa.len(), 18, "17 significant digits in {cell}");
    }
}

#[test]
fn fidelity_inset_starts_at_one() {
    let dir = tempfile::tempdir().unwrap();
    let fid = dir.path().join("inset.csv");
    let out = qbounds(&["figure2", "--nu", "1,2", "--fidelity-out", fid.to_str().unwrap()]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(fid).unwrap();
    let body: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(body[0], "h,nu1,nu2,nu5,nu10,nu100");
    let first: Vec<f64> = body[1].split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(first, vec![0.0, 1.0, 1.0, 1.0, 1.0, 1.0]);
}

#[test]
fn heisenberg_reports_constants() {
    let dir = tempfile::tempdir().unwrap();
    let m = model(
        dir.path(),
        "q.json",
        r#"{"type":"qubit","E":100000.0,"prior":{"sigma":0.1}}"#,
    );
    let out = qbounds(&["heisenberg", "--model", m.to_str().unwrap()]);
    assert!(out.status.success());
    let lambda = value(&out.stdout, "lambda");
    assert!((lambda - 0.7246).abs() < 5e-5);
    assert!(value(&out.stdout, "bound_prime") >= value(&out.stdout, "bound"));

    let flat = model(
        dir.path(),
        "flat.json",
        r#"{"type":"qubit","E":0.0,"prior":{"sigma":0.1}}"#,
    );
    let out = qbounds(&["heisenberg", "--model", flat.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn validate_emits_json_and_passes() {
    let out = qbounds(&["validate", "--seed", "42"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let text = String::from_utf8(out.stdout).unwrap();
    let records: Vec<serde_json::Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(records.len(), 7);
    assert!(records.iter().all(|r| r["passed"] == serde_json::Value::Bool(true)));
}

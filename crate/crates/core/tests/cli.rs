use std::path::Path;
use std::process::{Command, Output};

use gurlab::cli::instance::InstanceFile;
use gurlab::{DensityMatrix, Observable, StateVector};
use serde_json::Value;

fn gurlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gurlab")).args(args).output().expect("binary runs")
}

fn write_instance(dir: &Path, name: &str, f: &InstanceFile) -> String {
    let p = dir.join(name);
    std::fs::write(&p, f.to_json()).unwrap();
    p.to_str().unwrap().to_string()
}

fn paulis() -> Vec<Observable> {
    vec![Observable::pauli_x(), Observable::pauli_y(), Observable::pauli_z()]
}

fn verify_json(path: &str) -> (i32, Value) {
    let out = gurlab(&["verify", path, "--format", "json"]);
    let code = out.status.code().unwrap();
    let v = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (code, v)
}

#[test]
fn verify_pauli_state() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_instance(dir.path(), "x.json", &InstanceFile::from_pure(&StateVector::basis(2, 0), &paulis()));
    let (code, v) = verify_json(&p);
    assert_eq!(code, 0);
    assert_eq!(v["all_satisfied"], true);
    assert_eq!(v["gur_raw"]["saturated"], true);
    assert_eq!(v["gur_normalized"]["degenerate"], true);

    let text = gurlab(&["verify", &p]);
    assert_eq!(text.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&text.stdout).contains("dispersions:"));
}

#[test]
fn verify_maximally_mixed_qubit() {
    let dir = tempfile::tempdir().unwrap();
    let f = InstanceFile::from_mixed(&DensityMatrix::maximally_mixed(2), &paulis());
    let p = write_instance(dir.path(), "w.json", &f);
    let (code, v) = verify_json(&p);
    assert_eq!(code, 0);
    assert_eq!(v["source"], "density-matrix");
    for c in v["correlations"].as_array().unwrap() {
        assert!(c["rho"].as_f64().unwrap().abs() <= 1e-15);
    }
    let margin = v["gur_normalized"]["margin"].as_f64().unwrap();
    assert!((margin - 1.0).abs() <= 1e-12);
}

#[test]
fn verify_rejects_bad_input() {
    let dir = tempfile::tempdir().unwrap();
    let mut f = InstanceFile::from_pure(&StateVector::basis(2, 0), &paulis());
    f.observables[0][0][1] = [3.0, 0.0];
    let p = write_instance(dir.path(), "bad.json", &f);
    let out = gurlab(&["verify", &p]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Hermitian"));

    let garbage = dir.path().join("garbage.json");
    std::fs::write(&garbage, "{ not json").unwrap();
    assert_eq!(gurlab(&["verify", garbage.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(gurlab(&["verify", "/nonexistent/file.json"]).status.code(), Some(2));
    assert_eq!(gurlab(&["no-such-command"]).status.code(), Some(2));
}

#[test]
fn scan_csv_contents() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("scan.csv");
    let out = gurlab(&["scan", "--output", out_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));

    let text = std::fs::read_to_string(&out_path).unwrap();
    assert!(text.lines().any(|l| l.starts_with("# tol: ")));
    assert!(text.lines().any(|l| l.starts_with("# generator: ")));

    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_path(&out_path).unwrap();
    assert_eq!(
        rdr.headers().unwrap().iter().collect::<Vec<_>>(),
        ["rho12", "rho23", "rho31", "cos_sigma", "margin", "class"]
    );
    let rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 21 * 21 * 21 * 13);

    let find = |r: [f64; 3], cos: f64| {
        rows.iter()
            .find(|row| {
                let f = |k: usize| row[k].parse::<f64>().unwrap();
                (f(0) - r[0]).abs() < 1e-12
                    && (f(1) - r[1]).abs() < 1e-12
                    && (f(2) - r[2]).abs() < 1e-12
                    && (f(3) - cos).abs() < 1e-12
            })
            .expect("grid point present")
    };
    let half = find([0.5, 0.5, 0.5], -1.0);
    assert_eq!(&half[5], "boundary");
    let box_pt = find([0.9, 0.3, 0.9], 1.0);
    assert_eq!(&box_pt[5], "forbidden");
    assert!((box_pt[4].parse::<f64>().unwrap() + 0.224).abs() <= 1e-12);
    assert_eq!(&find([0.0, 0.0, 0.0], 1.0)[5], "allowed");
}

#[test]
fn probe_forbidden_target_not_reached() {
    let out = gurlab(&["probe", "--target", "0.9", "0.3", "0.9", "--budget", "3000", "--seed", "11"]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["reached"], false);
    assert_eq!(v["violations"], 0);
    assert_eq!(v["forbidden_hits"], 0);
    assert_eq!(v["seed"], 11);
    assert_eq!(v["trials"], 3000);

    // Same seed, same output.
    let again = gurlab(&["probe", "--target", "0.9", "0.3", "0.9", "--budget", "3000", "--seed", "11"]);
    assert_eq!(out.stdout, again.stdout);
}

#[test]
fn probe_records_entropy_seed() {
    let out = gurlab(&["probe", "--target", "0.2", "0.3", "0.4", "--budget", "50"]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["seed"].is_u64());
    assert_eq!(v["reached"], true);
    // The best instance is a valid instance file.
    let f: InstanceFile = serde_json::from_value(v["best_instance"].clone()).unwrap();
    assert!(f.validate(1e-9).is_ok());
}

#[test]
fn probe_rejects_out_of_range_target() {
    let out = gurlab(&["probe", "--target", "1.5", "0", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn demo_spin_report_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("spin.csv");
    let out = gurlab(&[
        "demo-spin",
        "--trials",
        "200",
        "--seed",
        "5",
        "--format",
        "json",
        "--output",
        csv_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["violations"], 0);
    assert_eq!(v["forbidden_hits"], 0);
    for k in ["rho12", "rho23", "rho31"] {
        assert!((v["ghz"][k].as_f64().unwrap() - 1.0).abs() <= 1e-12);
        assert!(v["product"][k].as_f64().unwrap().abs() <= 1e-12);
    }

    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_path(&csv_path).unwrap();
    assert_eq!(rdr.headers().unwrap().len(), 5);
    assert_eq!(rdr.records().count(), 200);
}

#[test]
fn sample_then_verify_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    for ensemble in ["state", "density"] {
        let p = dir.path().join(format!("{ensemble}.json"));
        let out = gurlab(&[
            "sample",
            "--dim",
            "4",
            "--ensemble",
            ensemble,
            "--seed",
            "21",
            "--output",
            p.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));

        let f = InstanceFile::load(&p).unwrap();
        let direct = f.validate(1e-9).unwrap().moments().unwrap();

        let (code, v) = verify_json(p.to_str().unwrap());
        assert_eq!(code, 0);
        for (k, s) in v["sigma2"].as_array().unwrap().iter().enumerate() {
            assert!((s.as_f64().unwrap() - direct.sigma2[k]).abs() <= 1e-12 * (1.0 + direct.sigma2[k]));
        }
        // Re-serializing the loaded file reproduces it.
        let again: InstanceFile = serde_json::from_str(&f.to_json()).unwrap();
        assert_eq!(again, f);
    }
}

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_curvosc");

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn run(args: &[&str], out: &Path) -> Output {
    Command::new(BIN).args(args).arg("--out").arg(out).output().expect("binary runs")
}

fn run_config(name: &str, command: &str, out: &Path) -> Output {
    let cfg = configs().join(name);
    run(&["--config", cfg.to_str().unwrap(), command], out)
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn csv_rows(path: &Path) -> (String, Vec<Vec<String>>) {
    let text = fs::read_to_string(path).unwrap();
    assert!(!text.contains('\r'));
    let mut lines = text.lines();
    let header = lines.next().unwrap().to_string();
    let width = header.split(',').count();
    let rows: Vec<Vec<String>> = lines.map(|l| l.split(',').map(str::to_string).collect()).collect();
    assert!(rows.iter().all(|r| r.len() == width), "ragged rows in {}", path.display());
    (header, rows)
}

fn write_config(dir: &Path, body: &str) -> PathBuf {
    let path = dir.join("run.toml");
    fs::write(&path, body).unwrap();
    path
}

#[test]
fn help_and_usage_errors() {
    let out = tempfile::tempdir().unwrap();
    assert_eq!(Command::new(BIN).arg("--help").output().unwrap().status.code(), Some(0));
    assert_eq!(run(&["nonsense"], out.path()).status.code(), Some(2));
    assert_eq!(run(&["--config", "/no/such/file.toml", "simulate"], out.path()).status.code(), Some(2));
    assert_eq!(run(&["verify", "--suite", "bogus"], out.path()).status.code(), Some(2));
    assert_eq!(run(&["spectrum"], out.path()).status.code(), Some(2));
}

#[test]
fn unknown_config_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[params]\nkappa = 1.0\nomega = 1.0\ngamma = 2.0\ncolour = 3\n");
    let out = run(&["--config", cfg.to_str().unwrap(), "spectrum"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn simulate_shipped_config() {
    let out = tempfile::tempdir().unwrap();
    let res = run_config("simulate_sphere.toml", "simulate", out.path());
    assert_eq!(res.status.code(), Some(0), "{}", String::from_utf8_lossy(&res.stderr));

    let (header, rows) = csv_rows(&out.path().join("trajectory.csv"));
    assert_eq!(header, "t,x,y,px,py,H,Hxi,X,Y");
    assert_eq!(rows.len(), 1001);
    let t: Vec<f64> = rows.iter().map(|r| r[0].parse().unwrap()).collect();
    assert!(t.windows(2).all(|w| w[1] > w[0]));
    assert_eq!(*t.last().unwrap(), 100.0);

    let (header, rows) = csv_rows(&out.path().join("ambient.csv"));
    assert_eq!(header, "t,x0,x1,x2");
    for r in &rows {
        let v: Vec<f64> = r[1..].iter().map(|s| s.parse().unwrap()).collect();
        assert!((v[0] * v[0] + v[1] * v[1] + v[2] * v[2] - 1.0).abs() < 1e-12);
    }

    let report = json(&out.path().join("simulate.json"));
    assert_eq!(report["passed"], true);
    assert_eq!(report["integrator"]["steps"], 100000);
    assert_eq!(report["integrator"]["method"], "implicit_midpoint");
    assert!(report["drift"]["H"].as_f64().unwrap() < 1e-10);
    assert!(report["drift"]["Hxi"].as_f64().unwrap() < 1e-10);
    assert!(report["closure"].is_null());
}

#[test]
fn simulate_failed_tolerance_and_domain_error() {
    let dir = tempfile::tempdir().unwrap();
    let strict = "[params]\nkappa = 1.0\nomega = 1.0\nratio = [2, 1]\n\n[simulate]\n\
                  initial = { x = 0.15, y = 0.2, px = 0.15, py = -0.25 }\nt_end = 2.0\n\
                  drift_tolerance = { X = 1e-15 }\n";
    let cfg = write_config(dir.path(), strict);
    let out = run(&["--config", cfg.to_str().unwrap(), "simulate"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&dir.path().join("simulate.json"))["passed"], false);

    let pole = "[params]\nkappa = 1.0\nomega = 1.0\ngamma = 2.0\n\n[simulate]\n\
                initial = { x = 0.1, y = 1.5707963267948966, px = 0.0, py = 0.0 }\nt_end = 1.0\n";
    let cfg = write_config(dir.path(), pole);
    let out = run(&["--config", cfg.to_str().unwrap(), "simulate"], dir.path());
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn simulate_reports_closure() {
    let out = tempfile::tempdir().unwrap();
    let res = run_config("simulate_sphere_wide.toml", "simulate", out.path());
    assert_eq!(res.status.code(), Some(0));
    let report = json(&out.path().join("simulate.json"));
    let period = report["closure"]["period"].as_f64().unwrap();
    assert!((period - 5.673118724757).abs() < 1e-6, "{period}");
}

#[test]
fn flat_spectrum_classes() {
    let out = tempfile::tempdir().unwrap();
    assert_eq!(run_config("spectrum_flat.toml", "spectrum", out.path()).status.code(), Some(0));
    let report = json(&out.path().join("spectrum.json"));
    let sizes: Vec<u64> = report["classes"].as_array().unwrap().iter().map(|c| c["size"].as_u64().unwrap()).collect();
    assert_eq!(sizes, [1, 2, 3, 4]);
    for (i, c) in report["classes"].as_array().unwrap().iter().enumerate() {
        assert_eq!(c["energy"].as_f64().unwrap(), 1.0 + i as f64);
    }
    assert_eq!(report["entries"].as_array().unwrap().len(), 10);
    assert!(report["empty_channels"].as_array().unwrap().is_empty());
}

#[test]
fn hyperboloid_spectrum_is_finite() {
    let out = tempfile::tempdir().unwrap();
    assert_eq!(run_config("spectrum_hyperboloid.toml", "spectrum", out.path()).status.code(), Some(0));
    let report = json(&out.path().join("spectrum.json"));
    let entries = report["entries"].as_array().unwrap();
    assert!(!entries.is_empty());
    assert!(entries.iter().all(|e| e["mu"].as_u64().unwrap() <= 4));
}

#[test]
fn degeneracy_exports() {
    let out = tempfile::tempdir().unwrap();
    assert_eq!(run_config("degeneracies_sphere.toml", "degeneracies", out.path()).status.code(), Some(0));
    let (header, rows) = csv_rows(&out.path().join("degeneracies.csv"));
    assert_eq!(header, "key,size,energy,spread,members");
    for r in &rows {
        let size: usize = r[1].parse().unwrap();
        assert_eq!(r[4].matches('(').count(), size);
        assert!(r[3].parse::<f64>().unwrap() < 1e-12);
    }
    let report = json(&out.path().join("degeneracies.json"));
    assert_eq!(report["classes"].as_array().unwrap().len(), rows.len());
    assert!(report["min_relative_gap"].is_number());
}

#[test]
fn eigensolve_exports() {
    let out = tempfile::tempdir().unwrap();
    let res = run_config("eigensolve_sphere.toml", "eigensolve", out.path());
    assert_eq!(res.status.code(), Some(0), "{}", String::from_utf8_lossy(&res.stderr));
    let report = json(&out.path().join("eigensolve.json"));
    assert_eq!(report["passed"], true);
    assert_eq!(report["grid"]["map"], "pole_clustered");
    let n = report["grid"]["n_points"].as_u64().unwrap() as usize;
    for c in report["comparison"].as_array().unwrap() {
        assert!(c["richardson_rel_error"].as_f64().unwrap() < 1e-6);
    }
    let (header, rows) = csv_rows(&out.path().join("eigen_xi.csv"));
    assert!(header.starts_with("node,weight,gauge,xi_0"));
    assert_eq!(rows.len(), n);
    for entry in report["y"].as_array().unwrap() {
        let mu = entry["mu"].as_u64().unwrap();
        let (header, rows) = csv_rows(&out.path().join(format!("eigen_y_mu{mu}.csv")));
        assert!(header.starts_with("node,weight,gauge,y_0"));
        assert_eq!(rows.len(), n);
        // discrete vectors are unit vectors
        let norm: f64 = rows.iter().map(|r| r[3].parse::<f64>().unwrap().powi(2)).sum();
        assert!((norm - 1.0).abs() < 1e-12);
    }
}

#[test]
fn eigensolve_needs_curvature() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[params]\nkappa = 0.0\nomega = 1.0\ngamma = 1.0\n\n[eigensolve]\n");
    let out = run(&["--config", cfg.to_str().unwrap(), "eigensolve"], dir.path());
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn verify_suite_is_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        assert_eq!(run(&["verify", "--suite", "ktrig", "--seed", "11"], dir.path()).status.code(), Some(0));
    }
    let ra = fs::read(a.path().join("verify_ktrig.json")).unwrap();
    let rb = fs::read(b.path().join("verify_ktrig.json")).unwrap();
    assert_eq!(ra, rb);
    let report: Value = serde_json::from_slice(&ra).unwrap();
    assert_eq!(report["seed"], 11);
    assert_eq!(report["passed"], true);
}

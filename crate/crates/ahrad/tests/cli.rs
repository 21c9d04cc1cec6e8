use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const FUNNEL: &str = r#"{ "profile": "funnel", "a": 0.1, "n": 1, "L": 6.283185307179586, "x_max": 1.0 }"#;
const DATA: &str = r#"{ "modes": [ { "k": 1, "f2": [ { "center": 0.35, "half_width": 0.15 } ] } ] }"#;

fn ahrad(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ahrad"))
        .args(args)
        .env("AHRAD_OUT", dir.join("runs"))
        .current_dir(dir)
        .output()
        .expect("spawn ahrad")
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

fn field_config(dir: &Path) -> String {
    let body = format!(
        r#"{{ "metric": {FUNNEL}, "grid": {{ "delta": 0.004, "s_max": 12.0, "ds": 0.01, "k_max": 1 }}, "data": {DATA} }}"#
    );
    write_config(dir, "field.json", &body)
}

fn run_dirs(dir: &Path) -> Vec<std::path::PathBuf> {
    let mut v: Vec<_> = fs::read_dir(dir.join("runs")).unwrap().map(|e| e.unwrap().path()).collect();
    v.sort();
    v
}

#[test]
fn missing_grid_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "bad.json", &format!(r#"{{ "metric": {FUNNEL} }}"#));
    let out = ahrad(dir.path(), &["field", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("`grid`"), "{err}");
}

#[test]
fn unknown_nested_field_names_its_path() {
    let dir = tempfile::tempdir().unwrap();
    let body = format!(
        r#"{{ "metric": {FUNNEL}, "grid": {{ "delta": 0.004, "s_max": 8.0, "ds": 0.01, "k_max": 1, "dx": 1 }} }}"#
    );
    let cfg = write_config(dir.path(), "bad.json", &body);
    let out = ahrad(dir.path(), &["field", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("`grid.dx`"));
}

#[test]
fn field_run_writes_artifacts_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = field_config(dir.path());
    let out = ahrad(dir.path(), &["field", "--config", &cfg, "--jobs", "1"]);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert_eq!(out.status.code(), Some(0), "{stdout}{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout.contains("PASS unitarity_defect"));
    let runs = run_dirs(dir.path());
    assert_eq!(runs.len(), 1);
    let run = &runs[0];
    for f in ["config.json", "manifest.json", "field_0.csv", "fourier_0.csv", "unitarity.json"] {
        assert!(run.join(f).is_file(), "{f}");
    }
    let csv = fs::read_to_string(run.join("field_0.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("k,s,re_F,im_F"));
    let first = lines.next().unwrap();
    let mantissa = first.split(',').nth(1).unwrap().split('e').next().unwrap();
    assert_eq!(mantissa.trim_start_matches('-').replace('.', "").len(), 17);
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(run.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["jobs"], 1);
    assert_eq!(manifest["passed"], true);
    assert!(manifest["config_hash"].as_str().unwrap().starts_with(run.file_name().unwrap().to_str().unwrap()));
    assert!(manifest["wall_time_s"].as_f64().unwrap() >= 0.0);
    assert!(manifest["versions"]["ahrad_core"].is_string());

    let again = ahrad(dir.path(), &["field", "--config", &cfg]);
    assert_eq!(again.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&again.stdout).contains("up to date"));
    let forced = ahrad(dir.path(), &["field", "--config", &cfg, "--force"]);
    assert_eq!(forced.status.code(), Some(0));
    assert!(!String::from_utf8_lossy(&forced.stdout).contains("up to date"));
    assert_eq!(fs::read_to_string(run.join("field_0.csv")).unwrap(), csv);
}

#[test]
fn failed_checks_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let body = format!(
        r#"{{ "metric": {FUNNEL}, "grid": {{ "delta": 0.004, "s_max": 8.0, "ds": 0.01, "k_max": 1 }},
            "data": {DATA}, "tolerances": {{ "unitarity": 1e-12 }} }}"#
    );
    let cfg = write_config(dir.path(), "strict.json", &body);
    let out = ahrad(dir.path(), &["field", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL unitarity_defect"));
}

#[test]
fn scatter_run_passes() {
    let dir = tempfile::tempdir().unwrap();
    let body = format!(
        r#"{{ "metric": {FUNNEL}, "grid": {{ "delta": 0.004, "s_max": 12.0, "ds": 0.005, "k_max": 1 }},
            "scatter": {{ "modes": [1], "lambda_points": 17 }} }}"#
    );
    let cfg = write_config(dir.path(), "scatter.json", &body);
    let out = ahrad(dir.path(), &["scatter", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let run = &run_dirs(dir.path())[0];
    let records: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(run.join("scattering.json")).unwrap()).unwrap();
    let methods: Vec<&str> = records.as_array().unwrap().iter().map(|r| r["method"].as_str().unwrap()).collect();
    assert_eq!(methods.len(), 2);
    assert!(records[0]["config_hash"].is_string());
    assert!(run.join("agreement.csv").is_file());
}

#[test]
fn convergence_needs_three_levels() {
    let dir = tempfile::tempdir().unwrap();
    let body = format!(
        r#"{{ "metric": {FUNNEL}, "grid": {{ "delta": 0.004, "s_max": 12.0, "ds": 0.005, "k_max": 1 }},
            "data": {DATA}, "convergence": {{ "levels": 1 }} }}"#
    );
    let cfg = write_config(dir.path(), "conv.json", &body);
    let out = ahrad(dir.path(), &["convergence", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("at least 3 levels"));
}

#[test]
fn identical_configs_give_identical_outputs() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let cfg = field_config(d.path());
        assert_eq!(ahrad(d.path(), &["field", "--config", &cfg]).status.code(), Some(0));
    }
    let (ra, rb) = (&run_dirs(a.path())[0], &run_dirs(b.path())[0]);
    assert_eq!(ra.file_name(), rb.file_name());
    for f in ["field_0.csv", "fourier_0.csv", "unitarity.json", "config.json"] {
        assert_eq!(fs::read(ra.join(f)).unwrap(), fs::read(rb.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn shipped_configs_parse() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut seen = 0;
    for entry in fs::read_dir(root).unwrap() {
        let path = entry.unwrap().path();
        let text = fs::read_to_string(&path).unwrap();
        let cfg = ahrad::RunConfig::from_json(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert!(cfg.experiment.is_some(), "{}", path.display());
        seen += 1;
    }
    assert!(seen >= 7);
}

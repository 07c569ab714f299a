use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn cslgrav(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cslgrav"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("CSLGRAV_OUT")
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, json: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, json).unwrap();
    path.display().to_string()
}

fn manifest(out: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn solve_params_reports_localization_length() {
    let dir = tempfile::tempdir().unwrap();
    let o = cslgrav(&["solve-params", "--scenario", "planck-nucleon-monopole", "--check"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report: Value = serde_json::from_slice(&o.stdout).unwrap();
    let a = report["values"].as_array().unwrap().iter().find(|v| v["name"] == "a").unwrap();
    assert_eq!(a["unit"], "cm");
    assert!((a["value"].as_f64().unwrap() / 1.4e-5 - 1.0).abs() < 0.03);
    let m = manifest(dir.path());
    assert_eq!(m["config"]["command"], "solve-params");
    assert_eq!(m["config"]["params"]["scenario"], "planck-nucleon-monopole");
    assert!(m["config"]["seed"].is_u64());
    assert!(m["results"].as_array().unwrap().iter().all(|r| r["pass"] == true && r["target_formula"].is_string()));
}

#[test]
fn positional_scenario_is_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let o = cslgrav(&["solve-params", "planck-dipole", "--check"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(dir.path().join("solve-params.json").exists());
}

#[test]
fn sample_vacuum_default_check_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = cslgrav(&["sample-vacuum", "--model", "monopole", "--check"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = fs::read_to_string(dir.path().join("vacuum_covariance.csv")).unwrap();
    assert!(csv.starts_with("offset [cells],covariance [g^2 cm^-6],stderr [g^2 cm^-6],expected [g^2 cm^-6]\n"));
    assert!(!csv.contains('\r'));
}

#[test]
fn wrong_dimension_exits_one_with_field_path() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "bad.json",
        r#"{"command": "check-semiclassical", "params": {"scenarios": [{"name": "x", "model": "grwp",
            "radius": {"value": 1, "unit": "cm"}, "density": {"value": 1, "unit": "cm^3/g"},
            "v_probe": {"value": 1, "unit": "cm/s"}, "a": {"value": 1e-5, "unit": "cm"}}]}}"#,
    );
    let out = dir.path().join("out");
    let o = cslgrav(&["--config", &cfg], &out);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains("params.scenarios[0].density"), "{err}");
    assert!(err.contains("cm^3/g"), "{err}");
    assert!(!out.exists());
}

#[test]
fn unknown_unit_and_missing_field_are_reported() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "u.json", r#"{"command": "sample-vacuum", "params": {"cell": {"value": 1, "unit": "furlong"}}}"#);
    let o = cslgrav(&["--config", &cfg], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("params.cell"));
    let cfg = write_config(dir.path(), "m.json", r#"{"command": "sample-vacuum", "params": {"mu": {"value": 1}}}"#);
    let o = cslgrav(&["--config", &cfg], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("params.mu") && stderr(&o).contains("unit"));
    let cfg = write_config(dir.path(), "k.json", r#"{"command": "brownian", "params": {"runz": 3}}"#);
    let o = cslgrav(&["--config", &cfg], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("runz"));
}

#[test]
fn usage_errors_exit_one_and_help_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(cslgrav(&["--frobnicate"], dir.path()).status.code(), Some(1));
    assert_eq!(cslgrav(&[], dir.path()).status.code(), Some(1));
    assert_eq!(cslgrav(&["solve-params", "a", "--scenario", "b"], dir.path()).status.code(), Some(1));
    assert_eq!(cslgrav(&["--help"], dir.path()).status.code(), Some(0));
    assert_eq!(cslgrav(&["--version"], dir.path()).status.code(), Some(0));
}

#[test]
fn failed_tolerance_exits_two_only_under_check() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "wrong.json",
        r#"{"command": "check-semiclassical", "params": {"sweep": 0, "scenarios": [{"name": "cm", "model": "grwp",
            "radius": {"value": 1, "unit": "cm"}, "density": {"value": 1, "unit": "g/cm^3"},
            "v_probe": {"value": 1e-3, "unit": "cm/s"}, "a": {"value": 1e-5, "unit": "cm"},
            "expect_detectable": false}]}}"#,
    );
    assert_eq!(cslgrav(&["--config", &cfg, "--check"], dir.path()).status.code(), Some(2));
    assert_eq!(cslgrav(&["--config", &cfg], dir.path()).status.code(), Some(0));
    assert_eq!(manifest(dir.path())["results"][0]["pass"], false);
}

#[test]
fn same_seed_gives_identical_files_across_worker_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "b.json",
        r#"{"command": "brownian", "seed": 11, "params": {"model": "dipole", "runs": 64, "intervals": 60, "record_every": 20}}"#,
    );
    let runs: Vec<_> = ["1", "2", "3"]
        .iter()
        .map(|w| {
            let out = dir.path().join(format!("w{w}"));
            let o = cslgrav(&["--config", &cfg, "--workers", w], &out);
            assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
            fs::read(out.join("brownian_energy.csv")).unwrap()
        })
        .collect();
    assert!(runs.windows(2).all(|w| w[0] == w[1]));
    let text = String::from_utf8(runs[0].clone()).unwrap();
    assert!(text.starts_with("t [s],E_mean [erg],E_stderr [erg]\n"));
    assert_eq!(text.lines().count(), 5);

    let other = dir.path().join("seed12");
    cslgrav(&["--config", &cfg, "--seed", "12"], &other);
    assert_ne!(fs::read(other.join("brownian_energy.csv")).unwrap(), runs[0]);
}

#[test]
fn manifest_reproduces_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first");
    let o = cslgrav(
        &["sample-vacuum", "--model", "dipole", "--seed", "5", "--config", &write_config(dir.path(), "v.json", r#"{"params": {"extent": 12, "configs": 8}}"#)],
        &first,
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let second = dir.path().join("second");
    let manifest_path = first.join("manifest.json").display().to_string();
    let o = cslgrav(&["--config", &manifest_path, "--workers", "2"], &second);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    for f in ["vacuum_covariance.csv", "vacuum_spectrum.csv"] {
        assert_eq!(fs::read(first.join(f)).unwrap(), fs::read(second.join(f)).unwrap(), "{f}");
    }
    assert_eq!(manifest(&first)["config"], manifest(&second)["config"]);
    assert_eq!(manifest(&second)["config"]["params"]["model"], "dipole");
}

#[test]
fn simulate_csl_small_ensemble_passes_checks() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "c.json",
        r#"{"command": "simulate-csl", "params": {"trajectories": 2000, "steps": 1000, "record_every": 250, "dt": 0.02}}"#,
    );
    let o = cslgrav(&["--config", &cfg, "--check"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let names: Vec<String> =
        manifest(dir.path())["results"].as_array().unwrap().iter().map(|r| r["name"].as_str().unwrap().to_string()).collect();
    assert!(names.contains(&"max_trace_distance".to_string()));
    assert!(names.contains(&"outcome_frequency_1".to_string()));
    for f in ["csl_energy.csv", "csl_coherence.csv", "csl_outcomes.csv"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
}

#[test]
fn output_directory_defaults_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_cslgrav"))
        .args(["solve-params"])
        .env("CSLGRAV_OUT", dir.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(dir.path().join("manifest.json").exists());
}

#[test]
fn bad_separation_names_its_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "s.json", r#"{"command": "simulate-csl", "params": {"separation": 0.3}}"#);
    let o = cslgrav(&["--config", &cfg], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("params.separation"));
}

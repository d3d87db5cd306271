use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixture() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/constant_wave.json")
}

fn transverse(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_transverse"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn payload(path: &Path) -> Value {
    let v: Value = serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(v["schema_version"], 1);
    v["payload"].clone()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn pipeline_reports_transverse_instability() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "pipeline", "--alpha", "2", "--omega", "1", "--period", "6.2831853", "--parity", "even", "--modes", "128", "--tau",
        "auto:amplitude=1.5",
    ];
    let o = transverse(&args, dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report = payload(&dir.path().join("pipeline.json"));
    assert_eq!(report["verdict"], "transversally unstable");
    assert_eq!(report["passed"], true);
    let deltas = report["grid_doubling_deltas"].as_array().unwrap();
    assert_eq!(deltas.len(), 10);
    assert!(deltas.iter().all(|d| d.as_f64().unwrap() <= 1e-9));
    for name in ["wave.json", "spectrum_l1.json", "propositions.json", "hypotheses.json", "scan.json", "dns.json"] {
        assert!(dir.path().join(name).is_file(), "{name}");
    }
}

#[test]
fn spectrum_of_the_constant_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let wave = fixture();
    let o = transverse(&["spectrum", "--wave", wave.to_str().unwrap(), "--format", "both"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let l1 = payload(&dir.path().join("spectrum_l1.json"));
    assert_eq!(l1["n_negative"], 3);
    assert_eq!(l1["kernel_dimension"], 0);
    let csv = fs::read_to_string(dir.path().join("spectrum_l1.csv")).unwrap();
    assert_eq!(csv.lines().count(), 33);
    assert!(String::from_utf8_lossy(&o.stdout).contains("L1: n = 3, z = 0"));
}

#[test]
fn odd_parity_with_odd_power_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = transverse(&["solve", "--parity", "odd", "--alpha", "3"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("odd parity requires even integer alpha"), "{}", stderr(&o));
}

#[test]
fn failed_checks_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let wave = fixture();
    let o = transverse(&["verify", "--wave", wave.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    let props = payload(&dir.path().join("propositions.json"));
    assert_eq!(props["within_hypotheses"], false);
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.json");
    fs::write(&config, r#"{"alpha": 2, "omega": 1, "modes": 64, "kappa-steps": 5}"#).unwrap();
    let o = transverse(&["solve", "--config", config.to_str().unwrap(), "--modes", "32"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let wave = payload(&dir.path().join("wave.json"));
    assert_eq!(wave["phi"]["grid"]["modes"], 32);

    fs::write(&config, r#"{"alpah": 2}"#).unwrap();
    let o = transverse(&["solve", "--config", config.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn artifacts_are_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["solve", "--modes", "32"];
    assert!(transverse(&args, a.path()).status.success());
    assert!(transverse(&args, b.path()).status.success());
    assert_eq!(fs::read(a.path().join("wave.json")).unwrap(), fs::read(b.path().join("wave.json")).unwrap());
}

#[test]
fn scan_csv_only() {
    let dir = tempfile::tempdir().unwrap();
    let wave = fixture();
    let args = ["scan", "--wave", wave.to_str().unwrap(), "--kappa-min", "0.5", "--kappa-max", "2", "--kappa-steps", "4", "--format", "csv"];
    let o = transverse(&args, dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(!dir.path().join("scan.json").exists());
    let csv = fs::read_to_string(dir.path().join("scan.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "kappa,max_real_part,num_unstable_modes,leading_lambda_re,leading_lambda_im");
    assert_eq!(lines.len(), 5);
}

#[test]
fn dns_on_the_constant_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let wave = fixture();
    let o = transverse(&["dns", "--wave", wave.to_str().unwrap(), "--kappa", "1", "--format", "both"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let dns = payload(&dir.path().join("dns.json"));
    assert!((dns["fitted_rate"].as_f64().unwrap() - 1.0).abs() <= 0.01);
    assert!(fs::read_to_string(dir.path().join("growth.csv")).unwrap().starts_with("t,norm\n"));
}

#[test]
fn operational_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let broken = dir.path().join("broken.json");
    fs::write(&broken, "{\"schema_version\":1,\"type\":\"wave_profile\",\"payload\":{\"params\":[}}").unwrap();
    let o = transverse(&["spectrum", "--wave", broken.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("parse error at byte"), "{}", stderr(&o));

    let o = transverse(&["spectrum", "--wave", "/nonexistent/wave.json"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    let o = transverse(&["solve", "--modes", "33"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    let o = transverse(&["solve", "--no-such-flag"], dir.path());
    assert_eq!(o.status.code(), Some(1));
}

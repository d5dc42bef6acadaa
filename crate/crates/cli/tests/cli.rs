use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn nesslsd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nesslsd"))
        .args(args)
        .output()
        .unwrap()
}

fn write_config(dir: &Path, mu: f64, mu_bar: f64) -> String {
    let path = dir.join("config.json");
    let text = format!(
        r#"{{
            "name": "tiny",
            "model": {{"n": 7, "delta": 0.5, "field": {{"kind": "uniform"}},
                      "gamma": 1.0, "mu": {mu}, "mu_bar": {mu_bar}}},
            "sectors": [3, 4],
            "target": {{"kind": "ness"}}
        }}"#
    );
    fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn runs_a_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), 0.2, 0.3);
    let out_dir = dir.path().join("out");
    let out = nesslsd(&["--config", &config, "--out-dir", out_dir.to_str().unwrap(), "--seed", "4"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("tiny: "));
    for file in ["summary.json", "spacings.csv", "histogram.csv", "surmise_curves.csv"] {
        assert!(out_dir.join(file).exists(), "{file}");
    }
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["status"], "ok");
    assert_eq!(summary["config"]["seed"], 4);
}

#[test]
fn negative_rates_exit_with_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), 0.5, 0.6);
    let out = nesslsd(&["--config", &config]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("non-negative"));
}

#[test]
fn unknown_preset_lists_valid_names() {
    let out = nesslsd(&["--preset", "fig9"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("fig1a") && err.contains("fig5"), "{err}");
}

#[test]
fn paper_scale_is_refused() {
    let out = nesslsd(&["--preset", "fig1a", "--scale", "paper"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn non_convergence_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), 0.2, 0.3);
    let out_dir = dir.path().join("out");
    let out = nesslsd(&[
        "--config",
        &config,
        "--max-iter",
        "3",
        "--out-dir",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
    let summary = fs::read_to_string(out_dir.join("summary.json")).unwrap();
    assert!(summary.contains("\"failed\""));
}

#[test]
fn bad_tolerance_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), 0.2, 0.3);
    let out = nesslsd(&["--config", &config, "--tol", "-1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn lists_presets() {
    let out = nesslsd(&["--list-presets"]);
    assert!(out.status.success());
    let presets: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let names: Vec<&str> = presets
        .as_array()
        .unwrap()
        .iter()
        .map(|p| p["name"].as_str().unwrap())
        .collect();
    assert_eq!(names.len(), 8);
    assert!(names.contains(&"fig3"));
}

#[test]
fn needs_a_source() {
    assert_eq!(nesslsd(&[]).status.code(), Some(2));
}

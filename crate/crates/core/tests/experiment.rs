use std::fs;

use nesslsd::experiment::{
    emit_figure_data, find_preset, list_presets, run_experiment, ExperimentConfig, FieldSpec,
    ModelConfig, Scale, Summary, Target, DELTA_SWEEP,
};
use nesslsd::Error;

fn small_config() -> ExperimentConfig {
    let mut cfg = find_preset("fig2a").unwrap().desk[0].clone();
    cfg.name = "small".into();
    cfg.model.n = 7;
    cfg.sectors = vec![3, 4];
    cfg
}

#[test]
fn run_writes_all_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = small_config();
    cfg.out_dir = Some(dir.path().to_path_buf());
    let bundle = run_experiment(&cfg).unwrap();

    let summary: Summary =
        serde_json::from_str(&fs::read_to_string(dir.path().join("summary.json")).unwrap())
            .unwrap();
    assert_eq!(summary.status, "ok");
    assert_eq!(summary.config, cfg);
    assert_eq!(summary.sectors.len(), 2);
    assert_eq!(summary.spacing_count, bundle.pooled.len());
    assert!(summary.modes[0].residual < 1e-10);
    assert!(summary.ks.is_some());
    for s in &summary.sectors {
        assert_eq!(s.level_count + s.discarded_count, 35);
        assert!(s.use_log);
    }

    let spacings = fs::read_to_string(dir.path().join("spacings.csv")).unwrap();
    let header = spacings.lines().find(|l| !l.starts_with('#')).unwrap();
    assert_eq!(header, "model_id,n_up,index,spacing");
    assert!(spacings.starts_with("# unfolding log_polynomial degree 6 trim 0.02"));
    assert!(spacings.contains("discarded"));
    let rows = spacings.lines().filter(|l| l.starts_with("small/ness,")).count();
    assert_eq!(rows, bundle.pooled.len());

    let hist = fs::read_to_string(dir.path().join("histogram.csv")).unwrap();
    assert!(hist.starts_with("bin_center,density\n"));
    assert_eq!(hist.lines().count(), 41);
    let curves = fs::read_to_string(dir.path().join("surmise_curves.csv")).unwrap();
    let at_one = curves.lines().find(|l| l.starts_with("1.0000,")).unwrap();
    let gue: f64 = at_one.split(',').nth(3).unwrap().parse().unwrap();
    assert!((gue - 0.9076).abs() < 1e-4);
}

#[test]
fn identical_configs_give_identical_summaries() {
    let a = run_experiment(&small_config()).unwrap().summary;
    let b = run_experiment(&small_config()).unwrap().summary;
    let strip = |s: &Summary| {
        let mut v = serde_json::to_value(s).unwrap();
        v.as_object_mut().unwrap().remove("runtime");
        v
    };
    assert_eq!(strip(&a), strip(&b));
}

#[test]
fn failures_leave_a_marked_summary() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = small_config();
    cfg.solver.max_iter = 3;
    cfg.out_dir = Some(dir.path().to_path_buf());
    let err = run_experiment(&cfg).unwrap_err();
    assert!(matches!(err, Error::Convergence { .. }), "{err}");
    let summary: Summary =
        serde_json::from_str(&fs::read_to_string(dir.path().join("summary.json")).unwrap())
            .unwrap();
    assert_eq!(summary.status, "failed");
    assert!(summary.error.unwrap().contains("converge"));
}

#[test]
fn decay_mode_runs_use_raw_values() {
    let mut cfg = small_config();
    cfg.target = Target::Hdm { k: 2 };
    cfg.model.dephasing = 1.0;
    let bundle = run_experiment(&cfg).unwrap();
    assert_eq!(bundle.modes.len(), 2);
    assert_eq!(bundle.summary.modes[1].model_id, "small/hdm2");
    assert!(bundle.summary.modes.iter().all(|m| m.lambda_re < 0.0 && m.residual < 1e-8));
    assert!(bundle.summary.sectors.iter().all(|s| !s.use_log));
    assert_eq!(bundle.sectors.len(), 4);
}

#[test]
fn forbidden_driving_is_a_config_error() {
    let mut cfg = small_config();
    cfg.model.mu = 0.5;
    cfg.model.mu_bar = 0.6;
    let err = run_experiment(&cfg).unwrap_err();
    assert!(matches!(&err, Error::InvalidArgument(m) if m.contains("mu + mu_bar")), "{err}");
}

#[test]
fn config_validation() {
    let mut cfg = small_config();
    cfg.sectors = vec![8];
    assert!(cfg.validate().is_err());
    cfg.sectors = vec![3, 3];
    assert!(cfg.validate().is_err());
    let mut cfg = small_config();
    cfg.solver.tol = 0.0;
    assert!(cfg.validate().is_err());
    let mut cfg = small_config();
    cfg.target = Target::Hdm { k: 0 };
    assert!(cfg.validate().is_err());
}

#[test]
fn config_json_roundtrip_and_defaults() {
    let cfg = small_config();
    assert_eq!(ExperimentConfig::from_json(&cfg.to_json().unwrap()).unwrap(), cfg);
    let minimal = r#"{
        "name": "m",
        "model": {"n": 6, "delta": 0.5, "field": {"kind": "staggered"},
                  "gamma": 1.0, "mu": 0.1, "mu_bar": 0.0},
        "sectors": [3],
        "target": {"kind": "hdm", "k": 2}
    }"#;
    let cfg = ExperimentConfig::from_json(minimal).unwrap();
    assert_eq!(cfg.model.field, FieldSpec::Staggered);
    assert_eq!(cfg.model.dephasing, 0.0);
    assert_eq!(cfg.unfolding.degree, 6);
    assert!(matches!(
        ExperimentConfig::from_json("{"),
        Err(Error::Json(_))
    ));
}

#[test]
fn preset_catalogue() {
    let presets = list_presets();
    let names: Vec<&str> = presets.iter().map(|p| p.name.as_str()).collect();
    assert_eq!(
        names,
        ["fig1a", "fig1b", "fig1c", "fig2a", "fig2b", "fig3", "fig4", "fig5"]
    );
    let fig1c = &find_preset("fig1c").unwrap().paper[0].model;
    assert_eq!(
        (fig1c.delta, fig1c.mu, fig1c.mu_bar, fig1c.gamma, fig1c.n),
        (1.0, 1.0, 0.0, 0.1, 20)
    );
    let fig3 = find_preset("fig3").unwrap();
    let deltas: Vec<f64> = fig3.desk.iter().map(|c| c.model.delta).collect();
    assert_eq!(deltas, DELTA_SWEEP);
    for d in [0.5, 1.5, 3.0] {
        assert!(deltas.contains(&d));
    }
    for p in &presets {
        for cfg in p.configs(Scale::Desk) {
            cfg.validate().unwrap();
            cfg.check_runnable().unwrap();
            assert!(cfg.model.n <= 11);
        }
        for cfg in p.configs(Scale::Paper) {
            cfg.validate().unwrap();
        }
    }
    assert!(find_preset("fig1a").unwrap().paper[0].check_runnable().is_err());
    match find_preset("fig9") {
        Err(Error::UnknownPreset { valid, .. }) => assert_eq!(valid.len(), 8),
        other => panic!("{other:?}"),
    }
}

#[test]
fn custom_fields_must_match_the_chain() {
    let mut cfg = small_config();
    cfg.model = ModelConfig {
        field: FieldSpec::Custom { values: vec![0.1; 3] },
        ..cfg.model
    };
    assert!(cfg.validate().is_err());
}

#[test]
fn figure_data_can_be_regenerated_with_other_bins() {
    let bundle = run_experiment(&small_config()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    emit_figure_data(&bundle, dir.path(), 3.0, 0.25).unwrap();
    let hist = fs::read_to_string(dir.path().join("histogram.csv")).unwrap();
    assert_eq!(hist.lines().count(), 13);
    let curves = fs::read_to_string(dir.path().join("surmise_curves.csv")).unwrap();
    assert_eq!(curves.lines().count(), 302);
}

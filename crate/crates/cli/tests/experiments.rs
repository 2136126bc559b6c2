use qha_cli::{experiments, run_experiment, write_outputs, CliError, ExperimentConfig};

fn small(name: &str) -> ExperimentConfig {
    let mut c = ExperimentConfig::new(name);
    c.svg = true;
    c
}

#[test]
fn unknown_experiment_is_reported() {
    assert!(matches!(run_experiment(&small("nope")), Err(CliError::UnknownExperiment(_))));
}

#[test]
fn hermite_interp_starts_at_zero_entropy() {
    let out = run_experiment(&small("hermite_interp")).unwrap();
    assert_eq!(out.table.column_values("t")[0], 0.0);
    assert!(out.table.column_values("h_state_01")[0].abs() < 1e-10);
    assert!(!out.report.failed());
}

#[test]
fn outputs_carry_hash_and_tolerances() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = small("bounds_suite");
    cfg.trials = Some(6);
    cfg.d = Some(12);
    let out = run_experiment(&cfg).unwrap();
    let files = write_outputs(&out, dir.path()).unwrap();
    let text = std::fs::read_to_string(&files.csv).unwrap();
    assert!(text.contains(&format!("# config_hash: {}", cfg.hash())));
    assert!(text.contains("# tolerance.sandwich_slack"));
    assert!(files.svg.unwrap().exists());
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(files.report).unwrap()).unwrap();
    assert_eq!(report["config_hash"], cfg.hash());
    let rows: Vec<_> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows.len(), 7);
    let width = rows[0].split(',').count();
    assert!(rows.iter().all(|r| r.split(',').count() == width));
}

#[test]
fn small_runs_repeat_exactly() {
    let mut cfg = small("gauss_alc");
    cfg.trials = Some(3);
    cfg.d = Some(64);
    cfg.n = Some(10);
    let mut a = Vec::new();
    run_experiment(&cfg).unwrap().table.write(&mut a).unwrap();
    cfg.threads = Some(3);
    let mut b = Vec::new();
    run_experiment(&cfg).unwrap().table.write(&mut b).unwrap();
    assert_eq!(a, b);
}

#[test]
fn catalog_names_are_unique() {
    let mut names: Vec<_> = experiments::names().collect();
    let n = names.len();
    names.sort();
    names.dedup();
    assert_eq!(names.len(), n);
    assert_eq!(n, 12);
}

use std::path::{Path, PathBuf};
use std::process::Command;

use polya_cli::config::ExperimentKind;
use polya_cli::report::{from_csv, JsonReport};
use polya_cli::{run, ExperimentConfig};

fn configs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn polya(args: &[&str], config: &Path, out: &Path) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_polya")).args(args).arg("--config").arg(config).arg("--out").arg(out).output().unwrap()
}

#[test]
fn every_shipped_config_parses_and_round_trips() {
    let mut n = 0;
    for entry in std::fs::read_dir(configs_dir()).unwrap() {
        let path = entry.unwrap().path();
        let cfg = ExperimentConfig::load(&path).unwrap();
        let toml_again = ExperimentConfig::from_toml(&cfg.to_toml().unwrap()).unwrap();
        assert_eq!(toml_again, cfg, "{}", path.display());
        let json: ExperimentConfig = serde_json::from_str(&serde_json::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(json, cfg);
        n += 1;
    }
    assert!(n >= 10);
}

#[test]
fn csv_and_json_outputs_agree() {
    let out = tempfile::tempdir().unwrap();
    let cfg_path = configs_dir().join("polya-interval-point-mass.toml");
    let o = polya(&["--seed", "5"], &cfg_path, out.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));

    let csv = std::fs::read_to_string(out.path().join("polya-interval-point-mass.csv")).unwrap();
    assert!(csv.starts_with("experiment,series,s,i,j,metric,value,seed\n"));
    let rows = from_csv(&csv).unwrap();
    let doc: JsonReport = serde_json::from_str(&std::fs::read_to_string(out.path().join("polya-interval-point-mass.json")).unwrap()).unwrap();
    assert_eq!(doc.rows, rows);
    assert!(doc.passed);
    assert_eq!(doc.config.seed, 5);
    assert_eq!(doc.config.experiment, ExperimentKind::PolyaCheck);
    assert!(rows.iter().all(|r| r.seed == 5));

    // Point mass at 0: every H_i with i ≥ 2 is singular.
    for r in rows.iter().filter(|r| r.metric == "d_i") {
        if r.i.unwrap() >= 2 {
            assert_eq!(r.value, 0.0);
        }
    }
    assert!(rows.iter().any(|r| r.metric == "log_abs_h" && r.value == f64::NEG_INFINITY));
}

#[test]
fn flagged_runs_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = ExperimentConfig::load(&configs_dir().join("polya-interval-arcsine.toml")).unwrap();
    cfg.tolerances.slack = -1.0;
    cfg.degrees.max = 3;
    let path = dir.path().join("strict.toml");
    std::fs::write(&path, cfg.to_toml().unwrap()).unwrap();
    let o = polya(&["--format", "json"], &path, dir.path());
    assert_eq!(o.status.code(), Some(2));
    let doc: JsonReport = serde_json::from_str(&std::fs::read_to_string(dir.path().join("polya-interval-arcsine.json")).unwrap()).unwrap();
    assert!(!doc.passed && !doc.flags.is_empty());
}

#[test]
fn errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let o = polya(&[], &dir.path().join("missing.toml"), dir.path());
    assert_eq!(o.status.code(), Some(1));

    let path = dir.path().join("circle.toml");
    std::fs::write(
        &path,
        "id = \"c\"\nexperiment = \"sharpness\"\n[set]\nkind = \"circle\"\nradius = 1.0\n[measure]\nkind = \"uniform-circle\"\nradius = 1.0\n",
    )
    .unwrap();
    let o = polya(&[], &path, dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("real"));
}

#[test]
fn sharpness_refuses_complex_sets() {
    let cfg = ExperimentConfig::from_toml(
        "id = \"c\"\nexperiment = \"sharpness\"\n[set]\nkind = \"disk\"\nradius = 1.0\n[measure]\nkind = \"lebesgue-disk\"\nradius = 1.0\n",
    )
    .unwrap();
    let err = run(&cfg).unwrap_err();
    assert!(err.downcast_ref::<polya_core::Error>().is_some_and(|e| matches!(e, polya_core::Error::NotReal(_))));
}

#[test]
fn same_seed_same_rows() {
    let mut cfg = ExperimentConfig::load(&configs_dir().join("tdiam-circle.toml")).unwrap();
    cfg.degrees.max = 4;
    let a = polya_cli::run_with_workers(&cfg, Some(1)).unwrap();
    let b = polya_cli::run_with_workers(&cfg, Some(3)).unwrap();
    assert_eq!(a.rows, b.rows);
    cfg.seed += 1;
    let c = run(&cfg).unwrap();
    assert!(c.rows.iter().all(|r| r.seed == cfg.seed));
}

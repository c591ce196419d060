use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use soc_market::dynamics::{RunRecord, Simulation};
use soc_market_cli::config::ExperimentConfig;
use soc_market_cli::setup::build_market;

const SMALL: &str = r#"
[topology]
kind = "corner"
corner = "LB"
l = 8

[weights]
scheme = "fixed"
a = 0.3

[sim]
total_steps = 30000
transient_steps = 5000
checkpoint_every = 7000

[analysis]
decay_block = 500
min_events = 10

[ensemble]
seeds = [11]
"#;

fn soc_market(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_soc-market"))
        .args(args)
        .output()
        .unwrap()
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("c.toml");
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn config_errors_exit_with_1_and_name_the_field() {
    let tmp = tempfile::tempdir().unwrap();
    let bad = SMALL.replace("a = 0.3", "a = 1.5");
    let out = soc_market(&["run", "--config", &write_config(tmp.path(), &bad)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("weights.a"));

    let unknown = format!("{SMALL}\n[extra]\nx = 1\n");
    let out = soc_market(&["run", "--config", &write_config(tmp.path(), &unknown)]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn missing_record_is_a_runtime_error() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), SMALL);
    let missing = tmp.path().join("nope.record");
    let out = soc_market(&["decay-check", "--config", &cfg, "--record", s(&missing)]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn strict_escalates_statistics_warnings() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        &SMALL.replace("min_events = 10", "min_events = 1000000"),
    );
    let out_dir = tmp.path().join("o");
    let lenient = soc_market(&["avalanche-stats", "--config", &cfg, "--out", s(&out_dir)]);
    assert_eq!(lenient.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&lenient.stderr).contains("warning"));
    let strict = soc_market(&[
        "avalanche-stats",
        "--config",
        &cfg,
        "--out",
        s(&out_dir),
        "--strict",
    ]);
    assert_eq!(strict.status.code(), Some(3));
}

#[test]
fn records_from_another_configuration_are_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), SMALL);
    let run_dir = tmp.path().join("run");
    assert!(soc_market(&["run", "--config", &cfg, "--out", s(&run_dir)])
        .status
        .success());
    let other = write_config(tmp.path(), &SMALL.replace("a = 0.3", "a = 0.4"));
    let record = run_dir.join("run_s11.record");
    let out = soc_market(&["walk-stats", "--config", &other, "--record", s(&record)]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn resume_after_interruption_matches_uninterrupted_run() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg_path = write_config(tmp.path(), SMALL);
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    assert!(soc_market(&["run", "--config", &cfg_path, "--out", s(&a)])
        .status
        .success());

    // Rebuild the state of an interrupted run: a checkpoint at t = 14000 and
    // a record holding rows written after it.
    fs::create_dir_all(&b).unwrap();
    let cfg = ExperimentConfig::from_toml(SMALL).unwrap();
    let market = build_market(&cfg, 11).unwrap();
    let sim_cfg = cfg.sim.sim_config(11);
    let mut sim = Simulation::new(&market.net, &market.wts, sim_cfg.clone()).unwrap();
    let mut scratch = RunRecord::new(2, 5000, 14000);
    sim.run_until(14000, &mut scratch, |_| {}).unwrap();
    let mut ckpt = Vec::new();
    sim.checkpoint().write_to(&mut ckpt).unwrap();
    fs::write(b.join("run_s11.ckpt"), ckpt).unwrap();
    let full = fs::read_to_string(a.join("run_s11.record")).unwrap();
    let partial: Vec<&str> = full.lines().take(6 + 17000).collect();
    fs::write(b.join("run_s11.record"), partial.join("\n") + "\n").unwrap();

    let out = soc_market(&["run", "--config", &cfg_path, "--out", s(&b), "--resume"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    for name in ["run_s11.record", "summary.json", "manifest.json"] {
        assert_eq!(
            fs::read(a.join(name)).unwrap(),
            fs::read(b.join(name)).unwrap(),
            "{name}"
        );
    }
}

#[test]
fn engines_give_identical_records() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), SMALL);
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    assert!(
        soc_market(&["run", "--config", &cfg, "--out", s(&a), "--engine", "full"])
            .status
            .success()
    );
    assert!(soc_market(&["run", "--config", &cfg, "--out", s(&b)])
        .status
        .success());
    let rows = |d: &Path| {
        let text = fs::read_to_string(d.join("run_s11.record")).unwrap();
        text.lines()
            .filter(|l| !l.starts_with('#'))
            .map(String::from)
            .collect::<Vec<_>>()
    };
    assert_eq!(rows(&a), rows(&b));
}

#[test]
fn random_graphs_report_distances_without_fits() {
    let tmp = tempfile::tempdir().unwrap();
    let text = SMALL
        .replace(
            "kind = \"corner\"\ncorner = \"LB\"\nl = 8",
            "kind = \"er\"\nn = 40\nalpha = 0.1",
        )
        .replace("scheme = \"fixed\"\na = 0.3", "scheme = \"uniform\"");
    let cfg = write_config(tmp.path(), &text);
    let out_dir = tmp.path().join("w");
    let out = soc_market(&["walk-stats", "--config", &cfg, "--out", s(&out_dir)]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(out_dir.join("walk_s11_distances.csv").exists());
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("walk_s11.json")).unwrap()).unwrap();
    assert_eq!(json["power_law_fitted"], false);
    assert!(json["primary"]["pi1"].is_null());
}

#[test]
fn csv_outputs_carry_provenance() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg_text = SMALL;
    let cfg = write_config(tmp.path(), cfg_text);
    let out_dir = tmp.path().join("o");
    assert!(
        soc_market(&["avalanche-stats", "--config", &cfg, "--out", s(&out_dir)])
            .status
            .success()
    );
    let hash = ExperimentConfig::from_toml(cfg_text).unwrap().config_hash();
    for name in [
        "avalanche_size.csv",
        "avalanche_duration.csv",
        "threshold_scan.csv",
    ] {
        let text = fs::read_to_string(out_dir.join(name)).unwrap();
        assert_eq!(
            text.lines().next().unwrap(),
            format!("# config_hash {hash} seed 11"),
            "{name}"
        );
    }
}

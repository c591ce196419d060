use std::fs::{self, File, OpenOptions};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use soc_market::dynamics::{
    read_record, write_record_header, write_record_rows, Checkpoint, RecordMeta, RunRecord,
    Simulation,
};
use soc_market::topology::{write_network, write_weights};

use crate::config::ExperimentConfig;
use crate::output::{ensure_dir, write_atomic, write_json};
use crate::setup::{build_market, for_each_seed};
use crate::{CliError, Outcome};

/// Comment and column lines preceding the rows of a record file.
const RECORD_HEADER_LINES: usize = 6;

pub const MANIFEST_NAME: &str = "manifest.json";
pub const PARTIAL_MARKER: &str = "PARTIAL";

pub fn record_name(seed: u64) -> String {
    format!("run_s{seed}.record")
}

fn checkpoint_name(seed: u64) -> String {
    format!("run_s{seed}.ckpt")
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeedSummary {
    pub seed: u64,
    pub steps: usize,
    pub transient: usize,
    pub renormalizations: usize,
    pub initial_mean_price: f64,
    pub final_mean_price: f64,
    pub files: Vec<String>,
}

#[derive(Serialize)]
pub struct Manifest<'a> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub config_hash: String,
    pub run_hash: String,
    pub seeds: &'a [u64],
    pub config: ExperimentConfig,
    pub files: Vec<String>,
}

/// Reads the `config` table of a manifest written by [`cmd_run`].
pub fn load_manifest_config(path: &Path) -> Result<ExperimentConfig, CliError> {
    let text = fs::read_to_string(path).map_err(CliError::io(path))?;
    let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| CliError::Config {
        field: "<manifest>".into(),
        msg: e.to_string(),
    })?;
    let config = value
        .get("config")
        .cloned()
        .ok_or_else(|| CliError::Config {
            field: "<manifest>".into(),
            msg: "no config table".into(),
        })?;
    serde_json::from_value(config).map_err(|e| CliError::Config {
        field: "<manifest>.config".into(),
        msg: e.to_string(),
    })
}

/// Simulates every seed, writing per seed a network file, a weights file,
/// the run record and a checkpoint refreshed every `checkpoint_every`
/// steps; then `summary.json` and `manifest.json`. With `resume`, seeds
/// with a checkpoint continue from it.
pub fn cmd_run(cfg: &ExperimentConfig, resume: bool) -> Result<Outcome, CliError> {
    cfg.validate()?;
    let dir = &cfg.output.dir;
    ensure_dir(dir)?;
    let marker = dir.join(PARTIAL_MARKER);
    if marker.exists() {
        fs::remove_file(&marker).map_err(CliError::io(&marker))?;
    }
    let result = for_each_seed(&cfg.ensemble.seeds, cfg.ensemble.workers, |seed| {
        run_seed(cfg, seed, dir, resume)
    });
    let summaries = match result {
        Ok(s) => s,
        Err(e) => {
            // Best effort: the original error matters more than the marker.
            let _ = fs::write(&marker, format!("{e}\n"));
            return Err(e);
        }
    };

    let mut files: Vec<String> = summaries.iter().flat_map(|s| s.files.clone()).collect();
    let summary_path = dir.join("summary.json");
    write_json(&summary_path, &summaries)?;
    files.push("summary.json".into());
    let manifest = Manifest {
        tool: "soc-market",
        version: env!("CARGO_PKG_VERSION"),
        command: "run",
        config_hash: cfg.config_hash(),
        run_hash: cfg.run_hash(),
        seeds: &cfg.ensemble.seeds,
        config: cfg.canonical(),
        files: files.clone(),
    };
    write_json(&dir.join(MANIFEST_NAME), &manifest)?;
    files.push(MANIFEST_NAME.into());
    Ok(Outcome {
        files: files.into_iter().map(|f| dir.join(f)).collect(),
        warnings: Vec::new(),
    })
}

fn run_seed(
    cfg: &ExperimentConfig,
    seed: u64,
    dir: &Path,
    resume: bool,
) -> Result<SeedSummary, CliError> {
    let market = build_market(cfg, seed)?;
    let (net, wts) = (&market.net, &market.wts);
    let sim_cfg = cfg.sim.sim_config(seed);
    let meta = RecordMeta {
        config_hash: cfg.run_hash(),
        seed,
        extents: net.extents().to_vec(),
    };

    let net_name = format!("network_s{seed}.net");
    let wts_name = format!("weights_s{seed}.wts");
    let mut buf = Vec::new();
    write_network(net, &mut buf)?;
    write_atomic(&dir.join(&net_name), &buf)?;
    buf.clear();
    write_weights(net, wts, &mut buf)?;
    write_atomic(&dir.join(&wts_name), &buf)?;

    let rec_path = dir.join(record_name(seed));
    let ckpt_path = dir.join(checkpoint_name(seed));
    let dims = net.extents().len();
    let transient = sim_cfg.transient_steps as usize;
    let total = sim_cfg.total_steps as usize;

    let (mut sim, mut record) = if resume && ckpt_path.exists() {
        let ckpt =
            Checkpoint::read_from(File::open(&ckpt_path).map_err(CliError::io(&ckpt_path))?)?;
        let record = truncate_record(&rec_path, ckpt.t as usize, &meta)?;
        (
            Simulation::from_checkpoint(net, wts, sim_cfg.clone(), &ckpt)?,
            record,
        )
    } else {
        let mut out = Vec::new();
        write_record_header(&meta, dims, transient, &mut out)?;
        write_atomic(&rec_path, &out)?;
        (
            Simulation::new(net, wts, sim_cfg.clone())?,
            RunRecord::new(dims, transient, total),
        )
    };

    let every = cfg.sim.checkpoint_every;
    let file = OpenOptions::new()
        .append(true)
        .open(&rec_path)
        .map_err(CliError::io(&rec_path))?;
    let mut out = BufWriter::new(file);
    let mut written = record.len();
    loop {
        let target = (sim.t() / every + 1) * every;
        sim.run_until(target, &mut record, |_| {})?;
        write_record_rows(&record, written..record.len(), &mut out)?;
        out.flush().map_err(CliError::io(&rec_path))?;
        written = record.len();
        let mut bytes = Vec::new();
        sim.checkpoint().write_to(&mut bytes)?;
        write_atomic(&ckpt_path, &bytes)?;
        if sim.t() >= sim_cfg.total_steps {
            break;
        }
    }

    Ok(SeedSummary {
        seed,
        steps: record.len(),
        transient,
        renormalizations: record.renormalized.iter().filter(|&&r| r).count(),
        initial_mean_price: record.mean_price.first().copied().unwrap_or(f64::NAN),
        final_mean_price: sim.mean_price() * sim.scale(),
        files: vec![net_name, wts_name, record_name(seed), checkpoint_name(seed)],
    })
}

/// Keeps the first `steps` rows of a record file (dropping anything written
/// after the checkpoint) and returns them parsed.
fn truncate_record(path: &PathBuf, steps: usize, meta: &RecordMeta) -> Result<RunRecord, CliError> {
    let text = fs::read_to_string(path).map_err(CliError::io(path))?;
    let keep = RECORD_HEADER_LINES + steps;
    let lines: Vec<&str> = text.lines().take(keep).collect();
    if lines.len() < keep {
        return Err(CliError::Runtime(format!(
            "{}: record shorter than its checkpoint ({} of {steps} rows)",
            path.display(),
            lines.len().saturating_sub(RECORD_HEADER_LINES)
        )));
    }
    let mut kept = lines.join("\n");
    kept.push('\n');
    let (found, record) = read_record(kept.as_bytes())?;
    if found.config_hash != meta.config_hash || found.seed != meta.seed {
        return Err(CliError::Runtime(format!(
            "{}: record belongs to a different configuration or seed",
            path.display()
        )));
    }
    write_atomic(path, kept.as_bytes())?;
    Ok(record)
}

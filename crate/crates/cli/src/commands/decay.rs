use serde::Serialize;
use soc_market::analysis::{fit_decay_rate, predicted_decay_rate};

use super::{obtain_records, Source};
use crate::config::ExperimentConfig;
use crate::output::{ensure_dir, write_json};
use crate::{CliError, Outcome};

/// Accepted band for the ratio of fitted to predicted deflation rate.
pub const RATIO_BAND: [f64; 2] = [0.8, 1.25];

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DecayEntry {
    pub seed: u64,
    pub k_fit: f64,
    pub k_stderr: f64,
    pub r_squared: f64,
    pub ratio: f64,
    pub within_band: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecayReport {
    pub config_hash: String,
    pub n_agents: usize,
    /// `<eta> = eta_max / 2` for cuts uniform on `[0, eta_max)`.
    pub mean_eta: f64,
    pub k_predicted: f64,
    pub band: [f64; 2],
    pub seeds: Vec<DecayEntry>,
}

/// Fitted deflation rate of the post-transient mean price for every seed.
pub fn decay_analysis(cfg: &ExperimentConfig, source: &Source) -> Result<DecayReport, CliError> {
    cfg.validate()?;
    let n_agents = cfg.topology.n_agents();
    let mean_eta = cfg.sim.eta_max / 2.0;
    let k_predicted = predicted_decay_rate(mean_eta, n_agents);
    let seeds = obtain_records(cfg, source)?
        .into_iter()
        .map(|r| {
            let series = &r.record.mean_price;
            let fit = fit_decay_rate(
                series,
                r.record.transient..series.len(),
                cfg.analysis.decay_block,
            )?;
            let ratio = fit.k / k_predicted;
            Ok(DecayEntry {
                seed: r.seed,
                k_fit: fit.k,
                k_stderr: fit.stderr,
                r_squared: fit.r_squared,
                ratio,
                within_band: (RATIO_BAND[0]..=RATIO_BAND[1]).contains(&ratio),
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(DecayReport {
        config_hash: cfg.config_hash(),
        n_agents,
        mean_eta,
        k_predicted,
        band: RATIO_BAND,
        seeds,
    })
}

/// Writes `decay.json`; seeds whose ratio leaves the band raise a warning.
pub fn cmd_decay_check(cfg: &ExperimentConfig, source: &Source) -> Result<Outcome, CliError> {
    let rep = decay_analysis(cfg, source)?;
    ensure_dir(&cfg.output.dir)?;
    let path = cfg.output.dir.join("decay.json");
    write_json(&path, &rep)?;
    let warnings = rep
        .seeds
        .iter()
        .filter(|e| !e.within_band)
        .map(|e| {
            format!(
                "seed {}: k_fit / k_predicted = {:.3} outside {:?}",
                e.seed, e.ratio, RATIO_BAND
            )
        })
        .collect();
    Ok(Outcome {
        files: vec![path],
        warnings,
    })
}

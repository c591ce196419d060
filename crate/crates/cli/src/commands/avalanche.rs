use serde::Serialize;
use soc_market::analysis::{
    fit_decay_rate, fit_power_law, gamma_st, log_bin, most_scale_free, quantile, scaling_relation,
    Avalanches, PowerLawFit, ProfitSampler, ScanPoint, ThresholdScan, MEAN_FIELD_TAU_S,
    MEAN_FIELD_TAU_T,
};
use soc_market::dynamics::{run, run_with_observer};

use crate::config::{ExperimentConfig, RescalingName, ThresholdSpec};
use crate::output::{ensure_dir, write_csv, write_distribution, write_json, FitSummary};
use crate::setup::{build_market, for_each_seed};
use crate::{CliError, Outcome};

/// The threshold an avalanche analysis settled on.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThresholdReport {
    /// Position in the scan grid.
    pub index: usize,
    /// Target activity quantile; absent for an absolute threshold.
    pub q: Option<f64>,
    /// Threshold per seed, in rescaled-profit units.
    pub f0: Vec<f64>,
    /// Mean number of active agents per post-transient step, over seeds.
    pub mean_activity: f64,
    pub n_events: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GammaSummary {
    pub gamma: f64,
    pub stderr: f64,
    pub n_points: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScalingSummary {
    pub residual: f64,
    pub combined_stderr: f64,
    /// Residual within two combined standard errors.
    pub consistent: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MeanFieldComparison {
    pub tau_s: f64,
    pub tau_t: f64,
    pub delta_tau_s: Option<f64>,
    pub delta_tau_t: Option<f64>,
}

/// One grid point of a threshold scan, merged over seeds.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanRow {
    pub q: Option<f64>,
    pub f0: Vec<f64>,
    pub mean_activity: f64,
    pub n_events: usize,
    pub tau_s: Option<FitSummary>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AvalancheReport {
    pub config_hash: String,
    pub seeds: Vec<u64>,
    pub rescaling: RescalingName,
    /// Deflation rate per seed used by exponential detrending.
    pub detrend_k: Option<Vec<f64>>,
    pub threshold: ThresholdReport,
    pub tau_s: Option<FitSummary>,
    pub tau_t: Option<FitSummary>,
    pub gamma_st: Option<GammaSummary>,
    pub scaling: Option<ScalingSummary>,
    pub mean_field: MeanFieldComparison,
    pub low_statistics: bool,
    pub warnings: Vec<String>,
    #[serde(skip)]
    pub scan: Vec<ScanRow>,
    /// Avalanches at the selected threshold, merged over seeds.
    #[serde(skip)]
    pub avalanches: Avalanches,
}

struct SeedScan {
    k: Option<f64>,
    points: Vec<ScanPoint>,
}

/// Distinct thresholds in increasing order, and for each requested one its
/// position among them.
fn dedup_thresholds(f0s: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let mut unique: Vec<f64> = Vec::with_capacity(f0s.len());
    let mut index = Vec::with_capacity(f0s.len());
    for &f in f0s {
        if unique.last() != Some(&f) {
            unique.push(f);
        }
        index.push(unique.len() - 1);
    }
    (unique, index)
}

fn scan_seed(cfg: &ExperimentConfig, seed: u64) -> Result<SeedScan, CliError> {
    let market = build_market(cfg, seed)?;
    let (net, wts) = (&market.net, &market.wts);
    let sim = cfg.sim.sim_config(seed);
    let transient = sim.transient_steps;

    let k = match cfg.analysis.rescaling {
        RescalingName::MeanPrice => None,
        RescalingName::ExpDetrend => {
            let record = run(net, wts, &sim)?;
            let series = &record.mean_price;
            let fit = fit_decay_rate(
                series,
                transient as usize..series.len(),
                cfg.analysis.decay_block,
            )?;
            Some(fit.k)
        }
    };
    let rescaling = cfg.analysis.rescaling(k.unwrap_or(0.0));

    let (f0s, grid_index) = match cfg.analysis.threshold {
        ThresholdSpec::Absolute { f0 } => (vec![f0], vec![0]),
        spec => {
            let mut sampler = ProfitSampler::new(rescaling, transient, cfg.analysis.sample_stride)?;
            run_with_observer(net, wts, &sim, |v| sampler.observe(&v))?;
            let sorted = sampler.into_sorted();
            let f0s = spec
                .quantiles()
                .iter()
                .map(|&q| quantile(&sorted, q))
                .collect::<Result<Vec<f64>, _>>()?;
            dedup_thresholds(&f0s)
        }
    };
    let mut scan = ThresholdScan::new(rescaling, f0s, transient)?;
    run_with_observer(net, wts, &sim, |v| scan.observe(&v))?;
    let unique = scan.finish();
    let points = grid_index.iter().map(|&i| unique[i].clone()).collect();
    Ok(SeedScan { k, points })
}

fn fit_sizes(av: &Avalanches, range: [f64; 2]) -> Option<PowerLawFit> {
    let dist = log_bin(&av.sizes()).ok()?;
    fit_power_law(&dist, range[0], range[1]).ok()
}

fn fit_durations(av: &Avalanches, range: [f64; 2]) -> Option<PowerLawFit> {
    let dist = log_bin(&av.durations()).ok()?;
    fit_power_law(&dist, range[0], range[1]).ok()
}

/// Threshold selection and exponent fits over the whole ensemble, without
/// writing files.
pub fn avalanche_analysis(cfg: &ExperimentConfig) -> Result<AvalancheReport, CliError> {
    cfg.validate()?;
    let a = &cfg.analysis;
    let seeds = cfg.ensemble.seeds.clone();
    let per_seed = for_each_seed(&seeds, cfg.ensemble.workers, |seed| scan_seed(cfg, seed))?;
    let n_grid = per_seed[0].points.len();
    let qs = a.threshold.quantiles();

    let merged: Vec<Avalanches> = (0..n_grid)
        .map(|i| Avalanches::merge(per_seed.iter().map(|s| s.points[i].avalanches.clone())))
        .collect();
    let scan: Vec<ScanRow> = (0..n_grid)
        .map(|i| ScanRow {
            q: qs.get(i).copied(),
            f0: per_seed.iter().map(|s| s.points[i].f0).collect(),
            mean_activity: per_seed
                .iter()
                .map(|s| s.points[i].mean_activity)
                .sum::<f64>()
                / per_seed.len() as f64,
            n_events: merged[i].events.len(),
            tau_s: fit_sizes(&merged[i], a.size_fit)
                .as_ref()
                .map(FitSummary::from),
        })
        .collect();

    let mut warnings = Vec::new();
    let index = match a.threshold {
        ThresholdSpec::Scan { .. } => {
            let refs: Vec<&Avalanches> = merged.iter().collect();
            most_scale_free(&refs, a.size_fit[0], a.size_fit[1], a.min_events)?
        }
        _ => 0,
    };
    let avalanches = merged[index].clone();
    let n_events = avalanches.events.len();
    let low_statistics = n_events < a.min_events;
    if low_statistics {
        warnings.push(format!(
            "only {n_events} avalanches, fewer than {}",
            a.min_events
        ));
    }

    let tau_s = fit_sizes(&avalanches, a.size_fit);
    let tau_t = fit_durations(&avalanches, a.duration_fit);
    let gamma = gamma_st(&avalanches.events, 1, a.gamma_fit[0], a.gamma_fit[1]).ok();
    for (name, missing) in [
        ("tau_S", tau_s.is_none()),
        ("tau_T", tau_t.is_none()),
        ("gamma_ST", gamma.is_none()),
    ] {
        if missing {
            warnings.push(format!("{name} could not be fitted"));
        }
    }
    let scaling = match (&tau_s, &tau_t, &gamma) {
        (Some(s), Some(t), Some(g)) => {
            let c = scaling_relation(
                (s.exponent, s.stderr),
                (t.exponent, t.stderr),
                (g.gamma, g.stderr),
            );
            Some(ScalingSummary {
                residual: c.residual,
                combined_stderr: c.combined_stderr,
                consistent: c.residual <= 2.0 * c.combined_stderr,
            })
        }
        _ => None,
    };
    if scaling.is_some_and(|s| !s.consistent) {
        warnings.push("scaling relation violated beyond two standard errors".into());
    }

    let detrend_k = match a.rescaling {
        RescalingName::MeanPrice => None,
        RescalingName::ExpDetrend => Some(per_seed.iter().filter_map(|s| s.k).collect()),
    };
    let row = &scan[index];
    Ok(AvalancheReport {
        config_hash: cfg.config_hash(),
        seeds,
        rescaling: a.rescaling,
        detrend_k,
        threshold: ThresholdReport {
            index,
            q: row.q,
            f0: row.f0.clone(),
            mean_activity: row.mean_activity,
            n_events,
        },
        mean_field: MeanFieldComparison {
            tau_s: MEAN_FIELD_TAU_S,
            tau_t: MEAN_FIELD_TAU_T,
            delta_tau_s: tau_s.as_ref().map(|f| f.exponent - MEAN_FIELD_TAU_S),
            delta_tau_t: tau_t.as_ref().map(|f| f.exponent - MEAN_FIELD_TAU_T),
        },
        tau_s: tau_s.as_ref().map(FitSummary::from),
        tau_t: tau_t.as_ref().map(FitSummary::from),
        gamma_st: gamma.map(|g| GammaSummary {
            gamma: g.gamma,
            stderr: g.stderr,
            n_points: g.n_points,
        }),
        scaling,
        low_statistics,
        warnings,
        scan,
        avalanches,
    })
}

/// Writes `avalanche_size.csv`, `avalanche_duration.csv`,
/// `threshold_scan.csv` and `avalanche_fit.json`.
pub fn cmd_avalanche_stats(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let rep = avalanche_analysis(cfg)?;
    let dir = &cfg.output.dir;
    ensure_dir(dir)?;
    let (hash, seeds) = (&rep.config_hash, &rep.seeds);
    let mut out = Outcome {
        files: Vec::new(),
        warnings: rep.warnings.clone(),
    };

    for (name, values) in [
        ("avalanche_size.csv", rep.avalanches.sizes()),
        ("avalanche_duration.csv", rep.avalanches.durations()),
    ] {
        let path = dir.join(name);
        match log_bin(&values) {
            Ok(dist) => write_distribution(&path, hash, seeds, &dist)?,
            Err(_) => write_csv(
                &path,
                hash,
                seeds,
                &["x", "lo", "hi", "count", "density"],
                [],
            )?,
        }
        out.files.push(path);
    }

    let path = dir.join("threshold_scan.csv");
    let rows = rep.scan.iter().enumerate().map(|(i, r)| {
        let f0: Vec<String> = r.f0.iter().map(|f| f.to_string()).collect();
        vec![
            i.to_string(),
            r.q.map_or(String::new(), |q| q.to_string()),
            f0.join(" "),
            r.mean_activity.to_string(),
            r.n_events.to_string(),
            r.tau_s.map_or(String::new(), |f| f.exponent.to_string()),
            r.tau_s.map_or(String::new(), |f| f.stderr.to_string()),
        ]
    });
    let columns = [
        "index",
        "q",
        "f0",
        "mean_activity",
        "events",
        "tau_s",
        "tau_s_stderr",
    ];
    write_csv(&path, hash, seeds, &columns, rows)?;
    out.files.push(path);

    let path = dir.join("avalanche_fit.json");
    write_json(&path, &rep)?;
    out.files.push(path);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dedup_maps_every_threshold() {
        let (u, i) = dedup_thresholds(&[0.1, 0.1, 0.2, 0.3, 0.3]);
        assert_eq!(u, vec![0.1, 0.2, 0.3]);
        assert_eq!(i, vec![0, 0, 1, 2, 2]);
    }

    #[test]
    fn absolute_threshold_uses_no_quantiles() {
        assert!(ThresholdSpec::Absolute { f0: 0.1 }.quantiles().is_empty());
    }
}

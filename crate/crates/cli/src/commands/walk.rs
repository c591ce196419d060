use serde::Serialize;
use soc_market::analysis::{loser_jump_stats, JumpStats};

use super::{obtain_records, Source};
use crate::config::{ExperimentConfig, MetricName};
use crate::output::{ensure_dir, write_csv, write_json, FitSummary};
use crate::{CliError, Outcome};

/// Two-branch fit of the loser-jump distribution under one metric.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BranchFits {
    pub metric: &'static str,
    pub n_jumps: usize,
    pub extent: usize,
    /// Fit of `xi^(-pi1)` for `1 <= xi <= L/2`.
    pub pi1: Option<FitSummary>,
    /// Fit of `|L - xi|^(-pi2)` for `L/2 < xi < L`.
    pub pi2: Option<FitSummary>,
    /// Both branches fitted with decaying power laws.
    pub two_branch: bool,
    pub low_statistics: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WalkReport {
    pub config_hash: String,
    pub seed: u64,
    pub distance_mode: crate::config::DistanceModeName,
    /// False for random graphs, where positions carry no geometry.
    pub power_law_fitted: bool,
    pub primary: BranchFits,
    pub secondary: BranchFits,
    #[serde(skip)]
    pub stats: [JumpStats; 2],
}

fn branch(metric: MetricName, stats: &JumpStats, fitted: bool) -> BranchFits {
    let pi1 = fitted
        .then(|| stats.pi1.as_ref().map(FitSummary::from))
        .flatten();
    let pi2 = fitted
        .then(|| stats.pi2.as_ref().map(FitSummary::from))
        .flatten();
    let two_branch =
        matches!((&pi1, &pi2), (Some(a), Some(b)) if a.exponent > 0.0 && b.exponent > 0.0);
    BranchFits {
        metric: metric.label(),
        n_jumps: stats.distances.len(),
        extent: stats.extent,
        pi1,
        pi2,
        two_branch,
        low_statistics: stats.low_statistics,
    }
}

/// Jump statistics for every seed, without writing files.
pub fn walk_analysis(cfg: &ExperimentConfig, source: &Source) -> Result<Vec<WalkReport>, CliError> {
    cfg.validate()?;
    let fitted = !matches!(cfg.topology, crate::config::TopologySpec::Er { .. });
    let records = obtain_records(cfg, source)?;
    let hash = cfg.config_hash();
    records
        .into_iter()
        .map(|r| {
            let positions = r.record.post_transient_positions();
            let metrics = [cfg.analysis.metric, cfg.analysis.metric.other()];
            let stats = metrics.map(|m| {
                loser_jump_stats(
                    positions,
                    &r.extents,
                    cfg.analysis.distance_mode.into(),
                    m.metric(),
                )
            });
            let [a, b] = stats;
            let stats = [a?, b?];
            Ok(WalkReport {
                config_hash: hash.clone(),
                seed: r.seed,
                distance_mode: cfg.analysis.distance_mode,
                power_law_fitted: fitted,
                primary: branch(metrics[0], &stats[0], fitted),
                secondary: branch(metrics[1], &stats[1], fitted),
                stats,
            })
        })
        .collect()
}

/// Writes per seed the cumulative distribution `F(xi)` and histogram
/// `P(xi)` for both metrics plus `walk_s<seed>.json`; random graphs get the
/// raw distances instead of fits.
pub fn cmd_walk_stats(cfg: &ExperimentConfig, source: &Source) -> Result<Outcome, CliError> {
    let reports = walk_analysis(cfg, source)?;
    let dir = &cfg.output.dir;
    ensure_dir(dir)?;
    let mut out = Outcome::default();
    for rep in &reports {
        let seeds = [rep.seed];
        let hash = &rep.config_hash;
        for (fits, stats) in [
            (&rep.primary, &rep.stats[0]),
            (&rep.secondary, &rep.stats[1]),
        ] {
            let stem = format!("walk_s{}_{}", rep.seed, fits.metric);
            let path = dir.join(format!("{stem}_cumulative.csv"));
            let rows = stats
                .cumulative
                .iter()
                .map(|(x, f)| vec![x.to_string(), f.to_string()]);
            write_csv(&path, hash, &seeds, &["xi", "F"], rows)?;
            out.files.push(path);
            let path = dir.join(format!("{stem}_histogram.csv"));
            let rows = stats
                .histogram
                .iter()
                .map(|(x, p)| vec![x.to_string(), p.to_string()]);
            write_csv(&path, hash, &seeds, &["xi", "P"], rows)?;
            out.files.push(path);
            if fits.low_statistics {
                out.warnings
                    .push(format!("seed {}: only {} jumps", rep.seed, fits.n_jumps));
            }
        }
        if !rep.power_law_fitted {
            let path = dir.join(format!("walk_s{}_distances.csv", rep.seed));
            let rows = rep.stats[0].distances.iter().map(|d| vec![d.to_string()]);
            write_csv(&path, hash, &seeds, &["distance"], rows)?;
            out.files.push(path);
            out.warnings.push(format!(
                "seed {}: random graph, no power law fitted to jump distances",
                rep.seed
            ));
        }
        let path = dir.join(format!("walk_s{}.json", rep.seed));
        write_json(&path, rep)?;
        out.files.push(path);
    }
    Ok(out)
}

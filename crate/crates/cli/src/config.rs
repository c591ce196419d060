//! Experiment configuration: a TOML file with one table per concern.
//!
//! ```toml
//! [topology]
//! kind = "corner"        # ring | corner | manhattan | f_lattice | er
//! corner = "RT"
//! l = 32
//!
//! [weights]
//! scheme = "fixed"       # fixed | uniform
//! a = 0.25
//!
//! [sim]
//! total_steps = 1000000
//! transient_steps = 100000
//!
//! [analysis]
//! threshold = { mode = "scan", q_min = 0.002, q_max = 0.2, ratio = 1.05 }
//!
//! [ensemble]
//! seeds = [1, 2, 3, 4]
//! ```
//!
//! Every field has a default, so an empty file is a valid configuration.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use soc_market::analysis::Rescaling;
use soc_market::dynamics::{Engine, SimConfig};
use soc_market::topology::{Corner, DistanceMode, Metric};

use crate::CliError;

/// Fraction of agent-steps below threshold that the RT reference run
/// (N = 1024, a = 0.25, f0 = -0.048 in deflation-detrended price units)
/// produces; used when no threshold is configured.
pub const DEFAULT_ACTIVITY_QUANTILE: f64 = 0.006;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub topology: TopologySpec,
    pub weights: WeightSpec,
    pub sim: SimSpec,
    pub analysis: AnalysisSpec,
    pub ensemble: EnsembleSpec,
    pub output: OutputSpec,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            topology: TopologySpec::Corner {
                l: 32,
                corner: CornerName::RT,
            },
            weights: WeightSpec::Fixed { a: 0.5 },
            sim: SimSpec::default(),
            analysis: AnalysisSpec::default(),
            ensemble: EnsembleSpec::default(),
            output: OutputSpec::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TopologySpec {
    Ring { n: usize },
    Corner { l: usize, corner: CornerName },
    Manhattan { l: usize },
    FLattice { l: usize },
    Er { n: usize, alpha: f64 },
}

impl TopologySpec {
    pub fn n_agents(&self) -> usize {
        match *self {
            TopologySpec::Ring { n } | TopologySpec::Er { n, .. } => n,
            TopologySpec::Corner { l, .. }
            | TopologySpec::Manhattan { l }
            | TopologySpec::FLattice { l } => l * l,
        }
    }

    pub fn is_lattice(&self) -> bool {
        matches!(
            self,
            TopologySpec::Corner { .. }
                | TopologySpec::Manhattan { .. }
                | TopologySpec::FLattice { .. }
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CornerName {
    RT,
    LT,
    LB,
    RB,
}

impl From<CornerName> for Corner {
    fn from(c: CornerName) -> Corner {
        match c {
            CornerName::RT => Corner::RT,
            CornerName::LT => Corner::LT,
            CornerName::LB => Corner::LB,
            CornerName::RB => Corner::RB,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "scheme", rename_all = "snake_case", deny_unknown_fields)]
pub enum WeightSpec {
    Fixed { a: f64 },
    Uniform,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EngineName {
    Incremental,
    Full,
}

impl From<EngineName> for Engine {
    fn from(e: EngineName) -> Engine {
        match e {
            EngineName::Incremental => Engine::Incremental,
            EngineName::Full => Engine::Full,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimSpec {
    pub price_floor: f64,
    pub eta_max: f64,
    pub total_steps: u64,
    pub transient_steps: u64,
    /// Fraction of the initial mean price that triggers renormalization.
    pub renorm_threshold: f64,
    pub engine: EngineName,
    pub audit_interval: u64,
    pub checkpoint_every: u64,
}

impl Default for SimSpec {
    fn default() -> Self {
        let d = SimConfig::default();
        SimSpec {
            price_floor: d.price_floor,
            eta_max: d.eta_max,
            total_steps: d.total_steps,
            transient_steps: d.transient_steps,
            renorm_threshold: d.renorm_threshold,
            engine: EngineName::Incremental,
            audit_interval: d.audit_interval,
            checkpoint_every: 100_000,
        }
    }
}

impl SimSpec {
    pub fn sim_config(&self, seed: u64) -> SimConfig {
        SimConfig {
            price_floor: self.price_floor,
            eta_max: self.eta_max,
            total_steps: self.total_steps,
            transient_steps: self.transient_steps,
            seed,
            renorm_threshold: self.renorm_threshold,
            engine: self.engine.into(),
            audit_interval: self.audit_interval,
            record_profits: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RescalingName {
    MeanPrice,
    ExpDetrend,
}

/// How the avalanche threshold f0 is chosen.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum ThresholdSpec {
    /// Fixed f0 in rescaled-profit units.
    Absolute { f0: f64 },
    /// f0 is the `q`-quantile of the stationary rescaled-profit distribution,
    /// so that on average a fraction `q` of agents is active.
    Quantile { q: f64 },
    /// Quantiles on a geometric grid from `q_min` to `q_max`; the one whose
    /// size distribution is closest to a pure power law is reported.
    Scan { q_min: f64, q_max: f64, ratio: f64 },
}

impl ThresholdSpec {
    /// Quantile grid of a scan, or the single quantile.
    pub fn quantiles(&self) -> Vec<f64> {
        match *self {
            ThresholdSpec::Absolute { .. } => Vec::new(),
            ThresholdSpec::Quantile { q } => vec![q],
            ThresholdSpec::Scan {
                q_min,
                q_max,
                ratio,
            } => {
                let mut out = Vec::new();
                let mut k = 0;
                loop {
                    let q = q_min * ratio.powi(k);
                    if q > q_max * (1.0 + 1e-12) {
                        break;
                    }
                    out.push(q);
                    k += 1;
                }
                out
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistanceModeName {
    Raw,
    MinImage,
}

impl From<DistanceModeName> for DistanceMode {
    fn from(m: DistanceModeName) -> DistanceMode {
        match m {
            DistanceModeName::Raw => DistanceMode::Raw,
            DistanceModeName::MinImage => DistanceMode::MinImage,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricName {
    Norm,
    Component,
}

impl MetricName {
    pub fn metric(self) -> Metric {
        match self {
            MetricName::Norm => Metric::Norm,
            MetricName::Component => Metric::Component(0),
        }
    }

    pub fn other(self) -> MetricName {
        match self {
            MetricName::Norm => MetricName::Component,
            MetricName::Component => MetricName::Norm,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            MetricName::Norm => "norm",
            MetricName::Component => "component",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AnalysisSpec {
    pub rescaling: RescalingName,
    pub threshold: ThresholdSpec,
    pub size_fit: [f64; 2],
    pub duration_fit: [f64; 2],
    pub gamma_fit: [f64; 2],
    /// Fewer avalanches than this raise a statistics warning.
    pub min_events: usize,
    /// Rescaled profits are sampled every this many steps for quantiles.
    pub sample_stride: u64,
    pub distance_mode: DistanceModeName,
    /// Metric whose fit is reported first; the other is reported as well.
    pub metric: MetricName,
    /// Block length for smoothing the mean-price series in decay fits.
    pub decay_block: usize,
}

impl Default for AnalysisSpec {
    fn default() -> Self {
        AnalysisSpec {
            rescaling: RescalingName::MeanPrice,
            threshold: ThresholdSpec::Quantile {
                q: DEFAULT_ACTIVITY_QUANTILE,
            },
            size_fit: [10.0, 1e3],
            duration_fit: [10.0, 1e3],
            gamma_fit: [1.0, 1e6],
            min_events: 1000,
            sample_stride: 100,
            distance_mode: DistanceModeName::Raw,
            metric: MetricName::Norm,
            decay_block: 1000,
        }
    }
}

impl AnalysisSpec {
    /// Rescaling with the deflation rate resolved.
    pub fn rescaling(&self, k: f64) -> Rescaling {
        match self.rescaling {
            RescalingName::MeanPrice => Rescaling::MeanPrice,
            RescalingName::ExpDetrend => Rescaling::ExpDetrend { k },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EnsembleSpec {
    pub seeds: Vec<u64>,
    /// Concurrent runs; 0 uses every available core.
    pub workers: usize,
}

impl Default for EnsembleSpec {
    fn default() -> Self {
        EnsembleSpec {
            seeds: vec![1],
            workers: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSpec {
    pub dir: PathBuf,
}

impl Default for OutputSpec {
    fn default() -> Self {
        OutputSpec {
            dir: PathBuf::from("out"),
        }
    }
}

fn bad(field: &str, msg: impl fmt::Display) -> CliError {
    CliError::Config {
        field: field.to_string(),
        msg: msg.to_string(),
    }
}

fn check_range(field: &str, r: [f64; 2]) -> Result<(), CliError> {
    if !(r[0] > 0.0 && r[1] > r[0] && r[1].is_finite()) {
        return Err(bad(field, format!("need 0 < min < max, got {r:?}")));
    }
    Ok(())
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| bad("<file>", e.message()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| bad("<file>", format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// Rejects every parameter combination the model cannot run, naming
    /// the offending field.
    pub fn validate(&self) -> Result<(), CliError> {
        match self.topology {
            TopologySpec::Ring { n } if n < 3 => {
                return Err(bad("topology.n", "ring needs n >= 3"))
            }
            TopologySpec::Corner { l, .. } if l < 3 => {
                return Err(bad("topology.l", "corner lattice needs l >= 3"))
            }
            TopologySpec::Manhattan { l } | TopologySpec::FLattice { l } if l < 4 || l % 2 != 0 => {
                return Err(bad("topology.l", "lattice needs even l >= 4"))
            }
            TopologySpec::Er { n, .. } if n < 2 => return Err(bad("topology.n", "needs n >= 2")),
            TopologySpec::Er { alpha, .. } if !(alpha > 0.0 && alpha < 1.0) => {
                return Err(bad("topology.alpha", "must lie in (0, 1)"))
            }
            _ => {}
        }
        if let WeightSpec::Fixed { a } = self.weights {
            if !(a > 0.0 && a < 1.0) {
                return Err(bad("weights.a", "must lie in (0, 1)"));
            }
            if matches!(self.topology, TopologySpec::Er { .. }) {
                return Err(bad(
                    "weights.scheme",
                    "fixed split needs exactly two suppliers; use uniform",
                ));
            }
        }
        self.sim
            .sim_config(0)
            .validate()
            .map_err(|e| bad("sim", e))?;
        if self.sim.checkpoint_every == 0 {
            return Err(bad("sim.checkpoint_every", "must be positive"));
        }
        let a = &self.analysis;
        match a.threshold {
            ThresholdSpec::Absolute { f0 } if !f0.is_finite() => {
                return Err(bad("analysis.threshold.f0", "must be finite"))
            }
            ThresholdSpec::Quantile { q } if !(q > 0.0 && q < 1.0) => {
                return Err(bad("analysis.threshold.q", "must lie in (0, 1)"))
            }
            ThresholdSpec::Scan {
                q_min,
                q_max,
                ratio,
            } => {
                if !(q_min > 0.0 && q_max > q_min && q_max < 1.0) {
                    return Err(bad("analysis.threshold", "need 0 < q_min < q_max < 1"));
                }
                if !(ratio > 1.0 && ratio.is_finite()) {
                    return Err(bad("analysis.threshold.ratio", "must exceed 1"));
                }
                if self.analysis.threshold.quantiles().len() > 10_000 {
                    return Err(bad("analysis.threshold.ratio", "grid too fine"));
                }
            }
            _ => {}
        }
        check_range("analysis.size_fit", a.size_fit)?;
        check_range("analysis.duration_fit", a.duration_fit)?;
        check_range("analysis.gamma_fit", a.gamma_fit)?;
        if a.sample_stride == 0 {
            return Err(bad("analysis.sample_stride", "must be positive"));
        }
        if a.decay_block == 0 {
            return Err(bad("analysis.decay_block", "must be positive"));
        }
        let post = (self.sim.total_steps - self.sim.transient_steps) as usize;
        if post / a.decay_block < 3 {
            return Err(bad(
                "analysis.decay_block",
                "post-transient window holds fewer than 3 blocks",
            ));
        }
        if self.ensemble.seeds.is_empty() {
            return Err(bad("ensemble.seeds", "need at least one seed"));
        }
        let mut seen = self.ensemble.seeds.clone();
        seen.sort_unstable();
        if seen.windows(2).any(|w| w[0] == w[1]) {
            return Err(bad("ensemble.seeds", "seeds must be distinct"));
        }
        Ok(())
    }

    /// The configuration with fields that do not influence results
    /// (output location, worker count) reset, as stored in manifests.
    pub fn canonical(&self) -> ExperimentConfig {
        let mut c = self.clone();
        c.output = OutputSpec::default();
        c.ensemble.workers = 0;
        c
    }

    /// SHA-256 over the canonical JSON form of [`Self::canonical`].
    pub fn config_hash(&self) -> String {
        hash_json(&self.canonical())
    }

    /// Hash of the parts that determine a run record (topology, weights,
    /// dynamics); analysis settings do not enter.
    pub fn run_hash(&self) -> String {
        hash_json(&(&self.topology, &self.weights, &self.sim))
    }
}

fn hash_json<T: Serialize>(value: &T) -> String {
    let bytes = serde_json::to_vec(value).expect("config serializes");
    Sha256::digest(&bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

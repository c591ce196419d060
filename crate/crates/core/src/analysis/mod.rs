//! Observables extracted from run records: rescaled profits, activity
//! signals, avalanches, log-binned distributions, power-law fits,
//! loser-jump statistics and deflation-rate fits. [`ThresholdScan`] tracks
//! avalanches for a whole grid of thresholds in a single pass.
//!
//! Reference exponents for the mean-field branching process are
//! [`MEAN_FIELD_TAU_S`] and [`MEAN_FIELD_TAU_T`].

mod avalanche;
mod binning;
mod decay;
mod jumps;
mod rescale;
mod threshold;

pub use avalanche::{
    extract_avalanches, gamma_st, scaling_relation, AvalancheEvent, AvalancheTracker, Avalanches,
    GammaFit, ScalingCheck,
};
pub use binning::{
    discrete_mle_exponent, fit_loglog, fit_power_law, log_bin, Bin, BinnedDistribution, LineFit,
    PowerLawFit,
};
pub use decay::{fit_decay_rate, predicted_decay_rate, DecayFit};
pub use jumps::{jump_distances, loser_jump_stats, JumpStats, MIN_JUMPS};
pub use rescale::{activity_count, activity_signal, rescale_profits, ActivityRecorder, Rescaling};
pub use threshold::{most_scale_free, quantile, ProfitSampler, ScanPoint, ThresholdScan};

pub const MEAN_FIELD_TAU_S: f64 = 1.5;
pub const MEAN_FIELD_TAU_T: f64 = 2.0;

use std::ops::Range;

use super::binning::linear_fit;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecayFit {
    /// Rate in `f(t) ~ exp(-k t)`.
    pub k: f64,
    pub stderr: f64,
    pub r_squared: f64,
    pub n_blocks: usize,
}

/// `<eta> / (N (1 - <eta>))`.
pub fn predicted_decay_rate(mean_eta: f64, n_agents: usize) -> f64 {
    mean_eta / (n_agents as f64 * (1.0 - mean_eta))
}

/// Exponential decay rate of `series[window]`.
///
/// The window is smoothed by non-overlapping block means of length `block`
/// (use 1 for no smoothing); the rate is minus the least-squares slope of
/// `ln |block mean|` against block centre time. All block means must share a
/// sign.
pub fn fit_decay_rate(series: &[f64], window: Range<usize>, block: usize) -> Result<DecayFit> {
    if window.end > series.len() || window.start >= window.end {
        return Err(Error::InvalidParameter(format!(
            "window {window:?} outside series of length {}",
            series.len()
        )));
    }
    let block = block.max(1);
    let data = &series[window.clone()];
    let mut times = Vec::new();
    let mut logs = Vec::new();
    let mut sign = 0.0;
    for (b, chunk) in data.chunks(block).enumerate() {
        if chunk.len() < block && b > 0 {
            break;
        }
        let mean = chunk.iter().sum::<f64>() / chunk.len() as f64;
        if mean == 0.0 || !mean.is_finite() {
            return Err(Error::FitDomain(format!("block {b} has mean {mean}")));
        }
        if sign == 0.0 {
            sign = mean.signum();
        } else if mean.signum() != sign {
            return Err(Error::FitDomain(format!("sign change at block {b}")));
        }
        let centre = window.start as f64 + (b * block) as f64 + (chunk.len() as f64 - 1.0) / 2.0;
        times.push(centre);
        logs.push(mean.abs().ln());
    }
    if times.len() < 3 {
        return Err(Error::FitDomain(format!("{} blocks, need 3", times.len())));
    }
    let line = linear_fit(&times, &logs);
    Ok(DecayFit {
        k: -line.slope,
        stderr: line.slope_stderr,
        r_squared: line.r_squared,
        n_blocks: times.len(),
    })
}

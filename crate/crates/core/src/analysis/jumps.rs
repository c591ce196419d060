use super::binning::{fit_loglog, PowerLawFit};
use crate::topology::{jump_distance, DistanceMode, Metric, Position};
use crate::{Error, Result};

/// Below this many jumps the statistics are flagged as unreliable.
pub const MIN_JUMPS: usize = 1000;

/// Distribution of distances between consecutive losers.
#[derive(Clone, Debug, PartialEq)]
pub struct JumpStats {
    pub distances: Vec<f64>,
    /// `(xi, F(xi))` at each distinct distance, `F` the empirical CDF.
    pub cumulative: Vec<(f64, f64)>,
    /// `(xi, P(xi))` on unit bins centred on integers, `xi >= 1`.
    pub histogram: Vec<(f64, f64)>,
    /// Linear extent `L` that separates the two branches at `L / 2`.
    pub extent: usize,
    /// `P ~ xi^(-pi1)` for `1 <= xi <= L/2`.
    pub pi1: Option<PowerLawFit>,
    /// `P ~ |L - xi|^(-pi2)` for `L/2 < xi < L`.
    pub pi2: Option<PowerLawFit>,
    pub low_statistics: bool,
}

pub fn jump_distances(
    positions: &[Position],
    extents: &[usize],
    mode: DistanceMode,
    metric: Metric,
) -> Result<Vec<f64>> {
    positions
        .windows(2)
        .map(|w| jump_distance(w[0].as_slice(), w[1].as_slice(), extents, mode, metric))
        .collect()
}

pub fn loser_jump_stats(
    positions: &[Position],
    extents: &[usize],
    mode: DistanceMode,
    metric: Metric,
) -> Result<JumpStats> {
    if positions.len() < 2 {
        return Err(Error::InsufficientData(
            "need at least two loser positions".into(),
        ));
    }
    let distances = jump_distances(positions, extents, mode, metric)?;
    let extent = match metric {
        Metric::Component(axis) => extents[axis],
        Metric::Norm => extents[0],
    };

    let mut sorted = distances.clone();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut cumulative: Vec<(f64, f64)> = Vec::new();
    for (k, &d) in sorted.iter().enumerate() {
        match cumulative.last_mut() {
            Some(last) if last.0 == d => last.1 = (k + 1) as f64 / n,
            _ => cumulative.push((d, (k + 1) as f64 / n)),
        }
    }

    let max_bin = sorted.last().map(|d| d.round() as usize).unwrap_or(0);
    let mut counts = vec![0u64; max_bin + 1];
    for &d in &distances {
        counts[d.round() as usize] += 1;
    }
    let histogram: Vec<(f64, f64)> = counts
        .iter()
        .enumerate()
        .skip(1)
        .filter(|(_, &c)| c > 0)
        .map(|(k, &c)| (k as f64, c as f64 / n))
        .collect();

    let half = extent as f64 / 2.0;
    let fit_branch = |pts: Vec<(f64, f64)>, lo: f64, hi: f64| -> Option<PowerLawFit> {
        if pts.len() < 3 {
            return None;
        }
        let (xs, ys): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
        fit_loglog(&xs, &ys)
            .ok()
            .map(|l| PowerLawFit::from_line(l, lo, hi))
    };
    let near: Vec<(f64, f64)> = histogram
        .iter()
        .copied()
        .filter(|&(x, _)| x >= 1.0 && x <= half)
        .collect();
    let far: Vec<(f64, f64)> = histogram
        .iter()
        .copied()
        .filter(|&(x, _)| x > half && x < extent as f64)
        .map(|(x, p)| (extent as f64 - x, p))
        .collect();
    let pi1 = fit_branch(near, 1.0, half);
    let pi2 = fit_branch(far, 1.0, half);

    Ok(JumpStats {
        low_statistics: distances.len() < MIN_JUMPS,
        distances,
        cumulative,
        histogram,
        extent,
        pi1,
        pi2,
    })
}

use super::avalanche::{AvalancheTracker, Avalanches};
use super::binning::{fit_power_law, log_bin};
use super::rescale::{rescale_factor, Rescaling};
use crate::dynamics::StepView;
use crate::{Error, Result};

/// Post-transient sample of rescaled profits, taken every `stride` steps,
/// used to turn activity quantiles into absolute thresholds.
#[derive(Clone, Debug)]
pub struct ProfitSampler {
    pub rescaling: Rescaling,
    pub transient: u64,
    pub stride: u64,
    values: Vec<f64>,
}

impl ProfitSampler {
    pub fn new(rescaling: Rescaling, transient: u64, stride: u64) -> Result<Self> {
        if stride == 0 {
            return Err(Error::InvalidParameter(
                "sampling stride must be positive".into(),
            ));
        }
        Ok(ProfitSampler {
            rescaling,
            transient,
            stride,
            values: Vec::new(),
        })
    }

    pub fn observe(&mut self, view: &StepView<'_>) {
        if view.t >= self.transient && (view.t - self.transient).is_multiple_of(self.stride) {
            let f = rescale_factor(view.t, view.mean_price, view.scale, self.rescaling);
            self.values.extend(view.profits.iter().map(|s| s * f));
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Sorted sample.
    pub fn into_sorted(mut self) -> Vec<f64> {
        self.values.sort_by(f64::total_cmp);
        self.values
    }
}

/// Linearly interpolated `q`-quantile of an ascending sample.
pub fn quantile(sorted: &[f64], q: f64) -> Result<f64> {
    if sorted.is_empty() {
        return Err(Error::Empty("quantile sample"));
    }
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::InvalidParameter(format!(
            "quantile {q} outside [0, 1]"
        )));
    }
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    Ok(sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64))
}

/// Tracks avalanches for many thresholds in one pass.
#[derive(Clone, Debug)]
pub struct ThresholdScan {
    pub rescaling: Rescaling,
    pub transient: u64,
    thresholds: Vec<f64>,
    trackers: Vec<AvalancheTracker>,
    activity: Vec<u64>,
    steps: u64,
    counts: Vec<u32>,
}

impl ThresholdScan {
    /// Thresholds must be finite and strictly increasing.
    pub fn new(rescaling: Rescaling, thresholds: Vec<f64>, transient: u64) -> Result<Self> {
        if thresholds.is_empty() {
            return Err(Error::Empty("threshold list"));
        }
        if thresholds.iter().any(|f| !f.is_finite()) || thresholds.windows(2).any(|w| w[0] >= w[1])
        {
            return Err(Error::InvalidParameter(
                "thresholds must be finite and increasing".into(),
            ));
        }
        let n = thresholds.len();
        Ok(ThresholdScan {
            rescaling,
            transient,
            thresholds,
            trackers: vec![AvalancheTracker::new(); n],
            activity: vec![0; n],
            steps: 0,
            counts: vec![0; n + 1],
        })
    }

    pub fn thresholds(&self) -> &[f64] {
        &self.thresholds
    }

    pub fn observe(&mut self, view: &StepView<'_>) {
        if view.t < self.transient {
            return;
        }
        let f = rescale_factor(view.t, view.mean_price, view.scale, self.rescaling);
        self.counts.iter_mut().for_each(|c| *c = 0);
        for &s in view.profits {
            let r = s * f;
            // `r < f0` holds for every threshold from this index on.
            self.counts[self.thresholds.partition_point(|&f0| f0 <= r)] += 1;
        }
        let mut y = 0u32;
        for (k, tracker) in self.trackers.iter_mut().enumerate() {
            y += self.counts[k];
            tracker.push(y);
            self.activity[k] += y as u64;
        }
        self.steps += 1;
    }

    /// Per threshold: the avalanches and the mean activity per step.
    pub fn finish(self) -> Vec<ScanPoint> {
        let steps = self.steps.max(1) as f64;
        self.thresholds
            .into_iter()
            .zip(self.trackers)
            .zip(self.activity)
            .map(|((f0, tr), a)| ScanPoint {
                f0,
                mean_activity: a as f64 / steps,
                avalanches: tr.finish(),
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanPoint {
    pub f0: f64,
    pub mean_activity: f64,
    pub avalanches: Avalanches,
}

/// Index of the threshold whose avalanche-size distribution is closest to a
/// pure power law over `[x_min, x_max]`, judged by the standard error of the
/// log-log slope. Points with fewer than `min_events` events are skipped.
pub fn most_scale_free(
    points: &[&Avalanches],
    x_min: f64,
    x_max: f64,
    min_events: usize,
) -> Result<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (k, av) in points.iter().enumerate() {
        if av.events.len() < min_events {
            continue;
        }
        let Ok(dist) = log_bin(&av.sizes()) else {
            continue;
        };
        let Ok(fit) = fit_power_law(&dist, x_min, x_max) else {
            continue;
        };
        if fit.stderr.is_finite() && best.is_none_or(|(_, e)| fit.stderr < e) {
            best = Some((k, fit.stderr));
        }
    }
    best.map(|(k, _)| k).ok_or_else(|| {
        Error::InsufficientData(format!(
            "no threshold yields {min_events} avalanches and a fit"
        ))
    })
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;
    use crate::analysis::{activity_signal, extract_avalanches};

    #[test]
    fn quantile_interpolates() {
        let s = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert_eq!(quantile(&s, 0.0).unwrap(), 1.0);
        assert_eq!(quantile(&s, 1.0).unwrap(), 5.0);
        assert_eq!(quantile(&s, 0.5).unwrap(), 3.0);
        assert!((quantile(&s, 0.1).unwrap() - 1.4).abs() < 1e-12);
        assert!(quantile(&[], 0.5).is_err());
        assert!(quantile(&s, 1.5).is_err());
    }

    #[test]
    fn sampler_stride_and_transient() {
        let mut s = ProfitSampler::new(Rescaling::MeanPrice, 2, 3).unwrap();
        for t in 0..10 {
            s.observe(&StepView {
                t,
                profits: &[t as f64, -1.0],
                mean_price: 2.0,
                scale: 1.0,
            });
        }
        // Steps 2, 5 and 8.
        assert_eq!(s.into_sorted(), vec![-0.5, -0.5, -0.5, 1.0, 2.5, 4.0]);
        assert!(ProfitSampler::new(Rescaling::MeanPrice, 0, 0).is_err());
    }

    #[test]
    fn rejects_bad_thresholds() {
        assert!(ThresholdScan::new(Rescaling::MeanPrice, vec![], 0).is_err());
        assert!(ThresholdScan::new(Rescaling::MeanPrice, vec![0.1, 0.1], 0).is_err());
        assert!(ThresholdScan::new(Rescaling::MeanPrice, vec![f64::NAN], 0).is_err());
    }

    proptest! {
        #[test]
        fn scan_matches_single_thresholds(
            profits in prop::collection::vec(prop::collection::vec(-1.0f64..1.0, 6), 1..80),
            f0s in prop::collection::btree_set(-90i32..90, 1..6),
        ) {
            let thresholds: Vec<f64> = f0s.into_iter().map(|k| k as f64 / 100.0).collect();
            let mut scan = ThresholdScan::new(Rescaling::MeanPrice, thresholds.clone(), 1).unwrap();
            for (t, p) in profits.iter().enumerate() {
                scan.observe(&StepView { t: t as u64, profits: p, mean_price: 1.0, scale: 1.0 });
            }
            let points = scan.finish();
            for (f0, point) in thresholds.iter().zip(&points) {
                let signal: Vec<u32> = profits[1..].iter().map(|p| activity_signal(p, *f0)).collect();
                prop_assert_eq!(&point.avalanches, &extract_avalanches(&signal));
                let mean = signal.iter().map(|&y| y as f64).sum::<f64>() / signal.len().max(1) as f64;
                prop_assert!((point.mean_activity - mean).abs() < 1e-12);
            }
        }
    }
}

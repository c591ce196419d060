use crate::dynamics::StepView;
use crate::{Error, Result};

/// How raw profits are made stationary before thresholding.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Rescaling {
    /// `s_i(t) / <p(t)>`: exact, by degree-1 homogeneity of profit in prices.
    MeanPrice,
    /// `s_i(t) exp(k t)` in original money units, undoing a fitted deflation rate `k`.
    ExpDetrend { k: f64 },
}

/// Profits divided by the instantaneous mean price.
pub fn rescale_profits(profits: &[f64], mean_price: f64) -> Result<Vec<f64>> {
    if !(mean_price > 0.0 && mean_price.is_finite()) {
        return Err(Error::Domain(format!("mean price {mean_price}")));
    }
    Ok(profits.iter().map(|s| s / mean_price).collect())
}

/// Number of agents whose rescaled profit lies strictly below `f0`.
pub fn activity_signal(rescaled: &[f64], f0: f64) -> u32 {
    rescaled.iter().filter(|&&s| s < f0).count() as u32
}

/// Activity at one step straight from working-unit profits.
pub fn activity_count(view: &StepView<'_>, scale: f64, rescaling: Rescaling, f0: f64) -> u32 {
    let factor = rescale_factor(view.t, view.mean_price, scale, rescaling);
    view.profits.iter().filter(|&&s| s * factor < f0).count() as u32
}

/// Multiplier taking working-unit profits to rescaled profits.
pub(crate) fn rescale_factor(t: u64, mean_price: f64, scale: f64, rescaling: Rescaling) -> f64 {
    match rescaling {
        Rescaling::MeanPrice => 1.0 / mean_price,
        Rescaling::ExpDetrend { k } => scale * (k * t as f64).exp(),
    }
}

/// Collects the post-transient activity signal while a run progresses.
#[derive(Clone, Debug)]
pub struct ActivityRecorder {
    pub rescaling: Rescaling,
    pub f0: f64,
    pub transient: u64,
    pub signal: Vec<u32>,
}

impl ActivityRecorder {
    pub fn new(rescaling: Rescaling, f0: f64, transient: u64) -> Self {
        ActivityRecorder {
            rescaling,
            f0,
            transient,
            signal: Vec::new(),
        }
    }

    pub fn observe(&mut self, view: &StepView<'_>) {
        if view.t >= self.transient {
            self.signal
                .push(activity_count(view, view.scale, self.rescaling, self.f0));
        }
    }
}

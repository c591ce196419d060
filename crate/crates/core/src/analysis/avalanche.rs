use super::binning::{fit_loglog, LineFit};
use crate::{Error, Result};

/// A maximal run of nonzero activity bounded by quiescent steps.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AvalancheEvent {
    /// Sum of the activity over the run.
    pub size: u64,
    /// Number of active steps.
    pub duration: u64,
    /// Index of the first active step in the signal.
    pub start: usize,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Avalanches {
    pub events: Vec<AvalancheEvent>,
    /// Activity in the unterminated leading and trailing runs.
    pub discarded_activity: u64,
}

impl Avalanches {
    pub fn sizes(&self) -> Vec<u64> {
        self.events.iter().map(|e| e.size).collect()
    }

    pub fn durations(&self) -> Vec<u64> {
        self.events.iter().map(|e| e.duration).collect()
    }

    /// Concatenates per-run event lists; order-independent for statistics.
    pub fn merge(parts: impl IntoIterator<Item = Avalanches>) -> Avalanches {
        let mut out = Avalanches::default();
        for p in parts {
            out.events.extend(p.events);
            out.discarded_activity += p.discarded_activity;
        }
        out
    }
}

/// Splits an activity signal into avalanches. Runs touching either end of
/// the signal are not bounded by zeros on both sides and are discarded.
pub fn extract_avalanches(signal: &[u32]) -> Avalanches {
    let mut out = Avalanches::default();
    let mut t = 0;
    let n = signal.len();
    while t < n {
        if signal[t] == 0 {
            t += 1;
            continue;
        }
        let start = t;
        let mut size = 0u64;
        while t < n && signal[t] != 0 {
            size += signal[t] as u64;
            t += 1;
        }
        if start == 0 || t == n {
            out.discarded_activity += size;
        } else {
            out.events.push(AvalancheEvent {
                size,
                duration: (t - start) as u64,
                start,
            });
        }
    }
    out
}

/// Streaming form of [`extract_avalanches`], fed one activity value at a time.
#[derive(Clone, Debug, Default)]
pub struct AvalancheTracker {
    t: usize,
    run: Option<(usize, u64)>,
    out: Avalanches,
}

impl AvalancheTracker {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, y: u32) {
        if y == 0 {
            if let Some((start, size)) = self.run.take() {
                if start == 0 {
                    self.out.discarded_activity += size;
                } else {
                    let duration = (self.t - start) as u64;
                    self.out.events.push(AvalancheEvent {
                        size,
                        duration,
                        start,
                    });
                }
            }
        } else {
            let run = self.run.get_or_insert((self.t, 0));
            run.1 += y as u64;
        }
        self.t += 1;
    }

    /// Events so far; a run still open is counted as discarded.
    pub fn finish(mut self) -> Avalanches {
        if let Some((_, size)) = self.run.take() {
            self.out.discarded_activity += size;
        }
        self.out
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GammaFit {
    /// Exponent in `<S> ~ T^gamma`.
    pub gamma: f64,
    pub stderr: f64,
    pub n_events: usize,
    pub n_points: usize,
}

/// Fits `<S> ~ T^gamma`.
///
/// Events are grouped by exact duration to form `<S>(T)`; those points are
/// then pooled in logarithmic duration bins `[2^r, 2^(r+1) - 1]` by
/// geometric averaging of `T` and `<S>(T)`, and the bin points are fitted in
/// log-log space. Only durations within `[t_min, t_max]` are used.
pub fn gamma_st(
    events: &[AvalancheEvent],
    min_events: usize,
    t_min: f64,
    t_max: f64,
) -> Result<GammaFit> {
    if events.len() < min_events {
        return Err(Error::InsufficientData(format!(
            "{} avalanches, need {min_events}",
            events.len()
        )));
    }
    let mut by_t: std::collections::BTreeMap<u64, (u64, u64)> = Default::default();
    for e in events {
        let entry = by_t.entry(e.duration).or_default();
        entry.0 += e.size;
        entry.1 += 1;
    }
    // (sum ln T, sum ln <S>, count) per log bin.
    let mut bins: std::collections::BTreeMap<u32, (f64, f64, usize)> = Default::default();
    for (&t, &(s_sum, count)) in &by_t {
        if (t as f64) < t_min || (t as f64) > t_max {
            continue;
        }
        let mean_s = s_sum as f64 / count as f64;
        let b = bins.entry(63 - t.leading_zeros()).or_default();
        b.0 += (t as f64).ln();
        b.1 += mean_s.ln();
        b.2 += 1;
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = bins
        .values()
        .map(|&(lt, ls, c)| ((lt / c as f64).exp(), (ls / c as f64).exp()))
        .unzip();
    if xs.len() < 3 {
        return Err(Error::FitDomain(format!(
            "{} duration bins, need 3",
            xs.len()
        )));
    }
    let line: LineFit = fit_loglog(&xs, &ys)?;
    Ok(GammaFit {
        gamma: line.slope,
        stderr: line.slope_stderr,
        n_events: events.len(),
        n_points: line.n_points,
    })
}

/// Consistency of `tau_S = 1 + (tau_T - 1) / gamma_ST`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScalingCheck {
    /// `|tau_S - 1 - (tau_T - 1) / gamma|`.
    pub residual: f64,
    /// Propagated standard error of the residual.
    pub combined_stderr: f64,
}

pub fn scaling_relation(tau_s: (f64, f64), tau_t: (f64, f64), gamma: (f64, f64)) -> ScalingCheck {
    let (ts, ts_err) = tau_s;
    let (tt, tt_err) = tau_t;
    let (g, g_err) = gamma;
    let residual = (ts - 1.0 - (tt - 1.0) / g).abs();
    let combined =
        (ts_err.powi(2) + (tt_err / g).powi(2) + ((tt - 1.0) * g_err / (g * g)).powi(2)).sqrt();
    ScalingCheck {
        residual,
        combined_stderr: combined,
    }
}

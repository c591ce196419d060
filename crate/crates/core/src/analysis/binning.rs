use crate::{Error, Result};

/// One logarithmic bin `[2^r, 2^(r+1) - 1]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bin {
    pub lo: u64,
    pub hi: u64,
    /// `(lo + hi) / 2`.
    pub x: f64,
    pub count: u64,
    /// `count / (total * width)`.
    pub density: f64,
}

impl Bin {
    pub fn width(&self) -> u64 {
        self.hi - self.lo + 1
    }
}

/// Normalized histogram on contiguous logarithmic bins starting at `[1, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct BinnedDistribution {
    pub bins: Vec<Bin>,
    pub total: u64,
}

impl BinnedDistribution {
    /// `sum(density * width)`, one up to rounding.
    pub fn mass(&self) -> f64 {
        self.bins.iter().map(|b| b.density * b.width() as f64).sum()
    }
}

pub fn log_bin(values: &[u64]) -> Result<BinnedDistribution> {
    if values.is_empty() {
        return Err(Error::Empty("log_bin values"));
    }
    if values.contains(&0) {
        return Err(Error::Domain("log binning needs values >= 1".into()));
    }
    let max = *values.iter().max().unwrap();
    let n_bins = (64 - max.leading_zeros()) as usize;
    let mut counts = vec![0u64; n_bins];
    for &v in values {
        counts[(63 - v.leading_zeros()) as usize] += 1;
    }
    let total = values.len() as u64;
    let bins = counts
        .iter()
        .enumerate()
        .map(|(r, &count)| {
            let lo = 1u64 << r;
            let hi = (lo << 1) - 1;
            Bin {
                lo,
                hi,
                x: (lo + hi) as f64 / 2.0,
                count,
                density: count as f64 / (total as f64 * (hi - lo + 1) as f64),
            }
        })
        .collect();
    Ok(BinnedDistribution { bins, total })
}

/// Ordinary least-squares line `y = intercept + slope x`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope; NaN with fewer than three points.
    pub slope_stderr: f64,
    pub r_squared: f64,
    pub n_points: usize,
}

/// Least squares on `(ln x, ln y)`.
pub fn fit_loglog(xs: &[f64], ys: &[f64]) -> Result<LineFit> {
    if xs.len() != ys.len() {
        return Err(Error::DimensionMismatch {
            expected: xs.len(),
            got: ys.len(),
        });
    }
    if xs.len() < 2 {
        return Err(Error::FitDomain(format!(
            "need >= 2 points, got {}",
            xs.len()
        )));
    }
    if xs.iter().chain(ys).any(|v| !(*v > 0.0)) {
        return Err(Error::FitDomain("log-log fit needs positive values".into()));
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    Ok(linear_fit(&lx, &ly))
}

pub(crate) fn linear_fit(x: &[f64], y: &[f64]) -> LineFit {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|v| (v - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - intercept - slope * a).powi(2))
        .sum();
    let slope_stderr = if x.len() > 2 {
        (ssr / (n - 2.0) / sxx).sqrt()
    } else {
        f64::NAN
    };
    let r_squared = if syy > 0.0 { 1.0 - ssr / syy } else { 1.0 };
    LineFit {
        slope,
        intercept,
        slope_stderr,
        r_squared,
        n_points: x.len(),
    }
}

/// `P(x) ~ x^(-exponent)` over `[x_min, x_max]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PowerLawFit {
    pub exponent: f64,
    pub stderr: f64,
    pub x_min: f64,
    pub x_max: f64,
    pub n_points: usize,
    pub r_squared: f64,
}

impl PowerLawFit {
    pub(crate) fn from_line(line: LineFit, x_min: f64, x_max: f64) -> Self {
        PowerLawFit {
            exponent: -line.slope,
            stderr: line.slope_stderr,
            x_min,
            x_max,
            n_points: line.n_points,
            r_squared: line.r_squared,
        }
    }
}

/// Log-log least squares over bins whose representative lies in
/// `[x_min, x_max]` and whose density is positive. Needs three such bins.
pub fn fit_power_law(dist: &BinnedDistribution, x_min: f64, x_max: f64) -> Result<PowerLawFit> {
    let (xs, ys): (Vec<f64>, Vec<f64>) = dist
        .bins
        .iter()
        .filter(|b| b.x >= x_min && b.x <= x_max && b.density > 0.0)
        .map(|b| (b.x, b.density))
        .unzip();
    if xs.len() < 3 {
        return Err(Error::FitDomain(format!(
            "{} nonempty bins in [{x_min}, {x_max}], need 3",
            xs.len()
        )));
    }
    Ok(PowerLawFit::from_line(fit_loglog(&xs, &ys)?, x_min, x_max))
}

/// Approximate discrete maximum-likelihood exponent for values `>= x_min`
/// (continuous approximation with the half-integer shift). Returns
/// `(exponent, stderr)`.
pub fn discrete_mle_exponent(values: &[u64], x_min: u64) -> Result<(f64, f64)> {
    if x_min == 0 {
        return Err(Error::Domain("x_min must be >= 1".into()));
    }
    let base = x_min as f64 - 0.5;
    let (n, sum) = values
        .iter()
        .filter(|&&v| v >= x_min)
        .fold((0usize, 0.0), |(n, s), &v| {
            (n + 1, s + (v as f64 / base).ln())
        });
    if n < 2 || sum <= 0.0 {
        return Err(Error::InsufficientData(format!("{n} values >= {x_min}")));
    }
    let alpha = 1.0 + n as f64 / sum;
    Ok((alpha, (alpha - 1.0) / (n as f64).sqrt()))
}

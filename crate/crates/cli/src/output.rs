//! File writers. CSV files start with a `# config_hash <hex> seed <list>`
//! comment; JSON is pretty-printed with a trailing newline.

use std::fs;
use std::path::Path;

use serde::Serialize;
use soc_market::analysis::{BinnedDistribution, PowerLawFit};

use crate::CliError;

/// Writes through a temporary file and a rename, so readers never see a
/// half-written file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes).map_err(CliError::io(&tmp))?;
    fs::rename(&tmp, path).map_err(CliError::io(path))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Runtime(format!("serializing {}: {e}", path.display())))?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

pub fn provenance_line(config_hash: &str, seeds: &[u64]) -> String {
    let seeds: Vec<String> = seeds.iter().map(|s| s.to_string()).collect();
    format!("# config_hash {config_hash} seed {}\n", seeds.join(" "))
}

pub fn write_csv(
    path: &Path,
    config_hash: &str,
    seeds: &[u64],
    columns: &[&str],
    rows: impl IntoIterator<Item = Vec<String>>,
) -> Result<(), CliError> {
    let mut text = provenance_line(config_hash, seeds);
    text.push_str(&columns.join(","));
    text.push('\n');
    for row in rows {
        text.push_str(&row.join(","));
        text.push('\n');
    }
    write_atomic(path, text.as_bytes())
}

pub fn write_distribution(
    path: &Path,
    config_hash: &str,
    seeds: &[u64],
    dist: &BinnedDistribution,
) -> Result<(), CliError> {
    let rows = dist.bins.iter().map(|b| {
        vec![
            b.x.to_string(),
            b.lo.to_string(),
            b.hi.to_string(),
            b.count.to_string(),
            b.density.to_string(),
        ]
    });
    write_csv(
        path,
        config_hash,
        seeds,
        &["x", "lo", "hi", "count", "density"],
        rows,
    )
}

/// Serialized form of a power-law fit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FitSummary {
    pub exponent: f64,
    pub stderr: f64,
    pub range: [f64; 2],
    pub n_points: usize,
    pub r_squared: f64,
}

impl From<&PowerLawFit> for FitSummary {
    fn from(f: &PowerLawFit) -> Self {
        FitSummary {
            exponent: f.exponent,
            stderr: f.stderr,
            range: [f.x_min, f.x_max],
            n_points: f.n_points,
            r_squared: f.r_squared,
        }
    }
}

pub fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(CliError::io(dir))
}

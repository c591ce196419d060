use rayon::prelude::*;
use soc_market::dynamics::{seeded_rng, RngStream};
use soc_market::topology::*;

use crate::config::{ExperimentConfig, TopologySpec, WeightSpec};
use crate::CliError;

pub struct Market {
    pub net: TradeNetwork,
    pub wts: ExpenditureMatrix,
}

/// Network and weights for one ensemble member. Random graphs and random
/// weights draw from the seed's topology and weight streams.
pub fn build_market(cfg: &ExperimentConfig, seed: u64) -> Result<Market, CliError> {
    let net = match cfg.topology {
        TopologySpec::Ring { n } => build_ring(n)?,
        TopologySpec::Corner { l, corner } => build_corner_lattice(l, corner.into())?,
        TopologySpec::Manhattan { l } => build_manhattan(l)?,
        TopologySpec::FLattice { l } => build_f_lattice(l)?,
        TopologySpec::Er { n, alpha } => {
            build_er_embedded(n, alpha, &mut seeded_rng(seed, RngStream::Topology))?
        }
    };
    let wts = match cfg.weights {
        WeightSpec::Fixed { a } => assign_weights_fixed(&net, a)?,
        WeightSpec::Uniform => {
            assign_weights_uniform(&net, &mut seeded_rng(seed, RngStream::Weights))?
        }
    };
    Ok(Market { net, wts })
}

/// Applies `f` to every seed, `workers` at a time (0 = all cores); results
/// come back in seed order.
pub fn for_each_seed<T, F>(seeds: &[u64], workers: usize, f: F) -> Result<Vec<T>, CliError>
where
    T: Send,
    F: Fn(u64) -> Result<T, CliError> + Sync + Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::Runtime(format!("worker pool: {e}")))?;
    pool.install(|| seeds.par_iter().map(|&s| f(s)).collect())
}

mod avalanche;
mod decay;
mod run;
mod walk;

use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;

pub use avalanche::{avalanche_analysis, cmd_avalanche_stats, AvalancheReport, ThresholdReport};
pub use decay::{cmd_decay_check, decay_analysis, DecayEntry, DecayReport};
pub use run::{
    cmd_run, load_manifest_config, record_name, SeedSummary, MANIFEST_NAME, PARTIAL_MARKER,
};
pub use walk::{cmd_walk_stats, walk_analysis, BranchFits, WalkReport};

use soc_market::dynamics::{read_record, run, RunRecord};

use crate::config::ExperimentConfig;
use crate::setup::{build_market, for_each_seed};
use crate::CliError;

/// Where analysis commands get their run records from.
#[derive(Clone, Debug, PartialEq)]
pub enum Source {
    /// Simulate each ensemble seed afresh.
    Live,
    /// Read record files written by `run`; never modified.
    Records(Vec<PathBuf>),
}

pub(crate) struct SeedRecord {
    pub seed: u64,
    pub extents: Vec<usize>,
    pub record: RunRecord,
}

pub(crate) fn obtain_records(
    cfg: &ExperimentConfig,
    source: &Source,
) -> Result<Vec<SeedRecord>, CliError> {
    match source {
        Source::Live => for_each_seed(&cfg.ensemble.seeds, cfg.ensemble.workers, |seed| {
            let m = build_market(cfg, seed)?;
            let record = run(&m.net, &m.wts, &cfg.sim.sim_config(seed))?;
            Ok(SeedRecord {
                seed,
                extents: m.net.extents().to_vec(),
                record,
            })
        }),
        Source::Records(paths) => paths
            .iter()
            .map(|p| {
                let file = File::open(p).map_err(CliError::io(p))?;
                let (meta, record) = read_record(BufReader::new(file))?;
                if meta.config_hash != cfg.run_hash() {
                    return Err(CliError::Config {
                        field: "--record".into(),
                        msg: format!("{} was produced by a different configuration", p.display()),
                    });
                }
                Ok(SeedRecord {
                    seed: meta.seed,
                    extents: meta.extents,
                    record,
                })
            })
            .collect(),
    }
}

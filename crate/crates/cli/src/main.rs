use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use soc_market_cli::commands::{
    cmd_avalanche_stats, cmd_decay_check, cmd_run, cmd_walk_stats, load_manifest_config,
    record_name, Source,
};
use soc_market_cli::config::{EngineName, ThresholdSpec};
use soc_market_cli::{CliError, ExperimentConfig, Outcome};

/// Exit status when `--strict` turns statistics warnings into failure.
const EXIT_WARNINGS: u8 = 3;

#[derive(Parser)]
#[command(
    name = "soc-market",
    version,
    about = "Extremal-dynamics market experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate every seed and write run records plus a manifest.
    Run {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        engine: Option<EngineArg>,
        /// Continue seeds from their checkpoints.
        #[arg(long)]
        resume: bool,
    },
    /// Loser-jump distance statistics and two-branch fits.
    WalkStats {
        #[command(flatten)]
        common: Common,
        /// Record file to analyse instead of simulating; repeatable.
        #[arg(long)]
        record: Vec<PathBuf>,
    },
    /// Avalanche extraction and exponent fits.
    AvalancheStats {
        #[command(flatten)]
        common: Common,
        /// Absolute threshold in rescaled-profit units.
        #[arg(long, conflicts_with = "f0_quantile")]
        f0: Option<f64>,
        /// Threshold as a quantile of the stationary rescaled profits.
        #[arg(long)]
        f0_quantile: Option<f64>,
    },
    /// Compare the fitted deflation rate with its prediction.
    DecayCheck {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        record: Vec<PathBuf>,
    },
}

#[derive(Args)]
struct Common {
    /// Experiment configuration (TOML).
    #[arg(long, conflicts_with = "manifest")]
    config: Option<PathBuf>,
    /// Manifest written by `run`; its configuration and records are reused.
    #[arg(long)]
    manifest: Option<PathBuf>,
    /// Restrict the ensemble to these seeds; repeatable.
    #[arg(long)]
    seed: Vec<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Exit with status 3 when statistics warnings were raised.
    #[arg(long)]
    strict: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum EngineArg {
    Incremental,
    Full,
}

impl Common {
    fn load(&self) -> Result<ExperimentConfig, CliError> {
        let mut cfg = match (&self.config, &self.manifest) {
            (Some(path), _) => ExperimentConfig::load(path)?,
            (None, Some(path)) => load_manifest_config(path)?,
            (None, None) => ExperimentConfig::default(),
        };
        if !self.seed.is_empty() {
            cfg.ensemble.seeds = self.seed.clone();
        }
        if let Some(out) = &self.out {
            cfg.output.dir = out.clone();
        }
        Ok(cfg)
    }

    /// Explicit record files, else the records beside the manifest, else a
    /// fresh simulation.
    fn source(&self, cfg: &ExperimentConfig, records: &[PathBuf]) -> Source {
        if !records.is_empty() {
            return Source::Records(records.to_vec());
        }
        match self.manifest.as_ref().and_then(|m| m.parent()) {
            Some(dir) => Source::Records(
                cfg.ensemble
                    .seeds
                    .iter()
                    .map(|&s| dir.join(record_name(s)))
                    .collect(),
            ),
            None => Source::Live,
        }
    }
}

fn execute(command: &Command) -> Result<(Outcome, bool), CliError> {
    match command {
        Command::Run {
            common,
            engine,
            resume,
        } => {
            let mut cfg = common.load()?;
            if let Some(e) = engine {
                cfg.sim.engine = match e {
                    EngineArg::Incremental => EngineName::Incremental,
                    EngineArg::Full => EngineName::Full,
                };
            }
            Ok((cmd_run(&cfg, *resume)?, common.strict))
        }
        Command::WalkStats { common, record } => {
            let cfg = common.load()?;
            let source = common.source(&cfg, record);
            Ok((cmd_walk_stats(&cfg, &source)?, common.strict))
        }
        Command::AvalancheStats {
            common,
            f0,
            f0_quantile,
        } => {
            let mut cfg = common.load()?;
            if let Some(f0) = f0 {
                cfg.analysis.threshold = ThresholdSpec::Absolute { f0: *f0 };
            }
            if let Some(q) = f0_quantile {
                cfg.analysis.threshold = ThresholdSpec::Quantile { q: *q };
            }
            Ok((cmd_avalanche_stats(&cfg)?, common.strict))
        }
        Command::DecayCheck { common, record } => {
            let cfg = common.load()?;
            let source = common.source(&cfg, record);
            Ok((cmd_decay_check(&cfg, &source)?, common.strict))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli.command) {
        Ok((outcome, strict)) => {
            for f in &outcome.files {
                println!("{}", f.display());
            }
            for w in &outcome.warnings {
                eprintln!("warning: {w}");
            }
            if strict && !outcome.warnings.is_empty() {
                ExitCode::from(EXIT_WARNINGS)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

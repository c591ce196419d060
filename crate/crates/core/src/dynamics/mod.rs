//! Extremal price dynamics.
//!
//! Each step evaluates the market, finds the agent with the lowest profit,
//! and cuts that agent's price by a uniform random fraction in `[0, eta_max)`.
//! Prices therefore deflate at a rate of roughly `<eta> / N` per step. When
//! the mean price falls below a configured level every price is divided by
//! the mean; profits are degree-1 homogeneous in prices, so this leaves the
//! loser sequence unchanged while keeping values well inside `f64` range.
//! Recorded prices and profits are always reported in the original
//! (unrenormalized) units.

mod checkpoint;
mod incremental;
mod min_tree;
mod record;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub use checkpoint::{Checkpoint, CHECKPOINT_MAGIC, CHECKPOINT_VERSION};
pub use incremental::{incremental_evaluate, IncrementalEngine};
pub use record::{
    read_record, write_record, write_record_header, write_record_rows, RecordMeta, RunRecord,
    StepRecord,
};

use crate::market::{evaluate_market, MarketSnapshot, PriceVector};
use crate::topology::{ExpenditureMatrix, TradeNetwork};
use crate::{Error, Result};
use min_tree::MinTree;

/// Interval at which the running price sum is recomputed from scratch.
const PRICE_SUM_RESYNC: u64 = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Engine {
    /// Recompute every quantity every step; linear-scan argmin.
    Full,
    /// Recompute only the neighbourhood of the last price change; tournament-tree argmin.
    #[default]
    Incremental,
}

/// Independent random streams derived from one run seed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RngStream {
    Topology = 1,
    Weights = 2,
    Dynamics = 3,
}

pub fn seeded_rng(seed: u64, stream: RngStream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream as u64);
    rng
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimConfig {
    /// Initial prices are uniform on `[price_floor, price_floor + 1)`.
    pub price_floor: f64,
    pub eta_max: f64,
    pub total_steps: u64,
    pub transient_steps: u64,
    pub seed: u64,
    /// Renormalize when the mean price drops below this fraction of the
    /// initial mean. Zero disables renormalization.
    pub renorm_threshold: f64,
    pub engine: Engine,
    /// Compare the incremental snapshot against a full evaluation every this
    /// many steps. Zero disables the audit.
    pub audit_interval: u64,
    /// Keep every step's full profit vector in the record.
    pub record_profits: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            price_floor: 10.0,
            eta_max: 0.01,
            total_steps: 1_000_000,
            transient_steps: 100_000,
            seed: 0,
            renorm_threshold: 1e-6,
            engine: Engine::Incremental,
            audit_interval: 0,
            record_profits: false,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.price_floor > 0.0 && self.price_floor.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "price_floor must be > 0, got {}",
                self.price_floor
            )));
        }
        if !(self.eta_max > 0.0 && self.eta_max < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "eta_max must lie in (0, 1), got {}",
                self.eta_max
            )));
        }
        if self.transient_steps >= self.total_steps {
            return Err(Error::InvalidParameter(format!(
                "transient_steps ({}) must be < total_steps ({})",
                self.transient_steps, self.total_steps
            )));
        }
        if !(self.renorm_threshold >= 0.0 && self.renorm_threshold < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "renorm_threshold must lie in [0, 1), got {}",
                self.renorm_threshold
            )));
        }
        Ok(())
    }
}

/// Independent uniform prices on `[price_floor, price_floor + 1)`.
pub fn init_prices<R: Rng + ?Sized>(
    config: &SimConfig,
    n_agents: usize,
    rng: &mut R,
) -> Result<PriceVector> {
    config.validate()?;
    PriceVector::new(
        (0..n_agents)
            .map(|_| config.price_floor + rng.gen::<f64>())
            .collect(),
    )
}

/// Index of the smallest profit; ties go to the lowest index.
pub fn find_loser(profits: &[f64]) -> Result<usize> {
    let (first, rest) = profits.split_first().ok_or(Error::Empty("profits"))?;
    let mut best = (0, *first);
    for (k, &v) in rest.iter().enumerate() {
        if v < best.1 {
            best = (k + 1, v);
        }
    }
    Ok(best.0)
}

/// Multiplies the loser's price by `1 - eta`, `eta` uniform on `[0, eta_max)`.
/// Returns the drawn `eta`.
pub fn apply_price_cut<R: Rng + ?Sized>(
    prices: &mut PriceVector,
    loser: usize,
    eta_max: f64,
    rng: &mut R,
) -> Result<f64> {
    let eta = rng.gen::<f64>() * eta_max;
    prices.set(loser, prices.get(loser) * (1.0 - eta))?;
    Ok(eta)
}

/// Borrowed view of the market at the start of a step, before the price cut.
#[derive(Clone, Copy, Debug)]
pub struct StepView<'s> {
    pub t: u64,
    /// Profits in working (possibly renormalized) units.
    pub profits: &'s [f64],
    /// Mean price in the same working units as `profits`.
    pub mean_price: f64,
    /// Multiplier from working to original units.
    pub scale: f64,
}

/// A running market under extremal dynamics.
pub struct Simulation<'a> {
    net: &'a TradeNetwork,
    wts: &'a ExpenditureMatrix,
    config: SimConfig,
    prices: PriceVector,
    snapshot: MarketSnapshot,
    rng: ChaCha8Rng,
    t: u64,
    price_sum: f64,
    /// Product of all renormalization divisors; absolute = working * scale.
    scale: f64,
    renorm_level: f64,
    engine: Option<(IncrementalEngine, MinTree)>,
}

impl<'a> Simulation<'a> {
    pub fn new(
        net: &'a TradeNetwork,
        wts: &'a ExpenditureMatrix,
        config: SimConfig,
    ) -> Result<Self> {
        config.validate()?;
        let mut rng = seeded_rng(config.seed, RngStream::Dynamics);
        let prices = init_prices(&config, net.n_agents(), &mut rng)?;
        let price_sum: f64 = prices.as_slice().iter().sum();
        let renorm_level = config.renorm_threshold * price_sum / net.n_agents() as f64;
        Self::assemble(
            net,
            wts,
            config,
            prices,
            rng,
            0,
            price_sum,
            1.0,
            renorm_level,
        )
    }

    /// Resumes a run from a checkpoint written by [`Simulation::checkpoint`].
    pub fn from_checkpoint(
        net: &'a TradeNetwork,
        wts: &'a ExpenditureMatrix,
        config: SimConfig,
        ckpt: &Checkpoint,
    ) -> Result<Self> {
        config.validate()?;
        if ckpt.prices.len() != net.n_agents() {
            return Err(Error::Checkpoint(format!(
                "checkpoint has {} prices, network has {} agents",
                ckpt.prices.len(),
                net.n_agents()
            )));
        }
        let mut rng = ChaCha8Rng::from_seed(ckpt.rng_seed);
        rng.set_stream(ckpt.rng_stream);
        rng.set_word_pos(ckpt.rng_word_pos);
        let prices = PriceVector::new(ckpt.prices.clone())?;
        Self::assemble(
            net,
            wts,
            config,
            prices,
            rng,
            ckpt.t,
            ckpt.price_sum,
            ckpt.scale,
            ckpt.renorm_level,
        )
    }

    #[allow(clippy::too_many_arguments)]
    fn assemble(
        net: &'a TradeNetwork,
        wts: &'a ExpenditureMatrix,
        config: SimConfig,
        prices: PriceVector,
        rng: ChaCha8Rng,
        t: u64,
        price_sum: f64,
        scale: f64,
        renorm_level: f64,
    ) -> Result<Self> {
        let snapshot = evaluate_market(&prices, net, wts)?;
        let engine = match config.engine {
            Engine::Full => None,
            Engine::Incremental => Some((
                IncrementalEngine::new(net.n_agents()),
                MinTree::build(snapshot.profit()),
            )),
        };
        Ok(Simulation {
            net,
            wts,
            config,
            prices,
            snapshot,
            rng,
            t,
            price_sum,
            scale,
            renorm_level,
            engine,
        })
    }

    pub fn t(&self) -> u64 {
        self.t
    }

    pub fn prices(&self) -> &PriceVector {
        &self.prices
    }

    pub fn snapshot(&self) -> &MarketSnapshot {
        &self.snapshot
    }

    /// Multiplier from working to original price units.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    /// Mean price in working units.
    pub fn mean_price(&self) -> f64 {
        self.price_sum / self.net.n_agents() as f64
    }

    pub fn view(&self) -> StepView<'_> {
        StepView {
            t: self.t,
            profits: self.snapshot.profit(),
            mean_price: self.mean_price(),
            scale: self.scale,
        }
    }

    pub fn checkpoint(&self) -> Checkpoint {
        Checkpoint {
            t: self.t,
            rng_seed: self.rng.get_seed(),
            rng_stream: self.rng.get_stream(),
            rng_word_pos: self.rng.get_word_pos(),
            scale: self.scale,
            price_sum: self.price_sum,
            renorm_level: self.renorm_level,
            prices: self.prices.as_slice().to_vec(),
        }
    }

    fn loser(&self) -> usize {
        match &self.engine {
            Some((_, tree)) => tree.argmin(),
            None => find_loser(self.snapshot.profit()).expect("network is nonempty"),
        }
    }

    fn full_refresh(&mut self) -> Result<()> {
        self.snapshot = evaluate_market(&self.prices, self.net, self.wts)?;
        if let Some((_, tree)) = &mut self.engine {
            *tree = MinTree::build(self.snapshot.profit());
        }
        Ok(())
    }

    /// Advances one trading day.
    pub fn step(&mut self) -> Result<StepRecord> {
        let n = self.net.n_agents();
        let loser = self.loser();
        let min_profit = self.snapshot.profit()[loser] * self.scale;
        let mean_price = self.mean_price() * self.scale;
        let t = self.t;

        let old = self.prices.get(loser);
        let eta = apply_price_cut(&mut self.prices, loser, self.config.eta_max, &mut self.rng)?;
        self.price_sum += self.prices.get(loser) - old;
        self.t += 1;
        if self.t.is_multiple_of(PRICE_SUM_RESYNC) {
            self.price_sum = self.prices.as_slice().iter().sum();
        }

        let mut renormalized = false;
        if self.price_sum / (n as f64) < self.renorm_level {
            let mean = self.price_sum / n as f64;
            self.prices.divide_all(mean)?;
            self.scale *= mean;
            self.price_sum = self.prices.as_slice().iter().sum();
            renormalized = true;
            self.full_refresh()?;
        } else {
            match &mut self.engine {
                None => {
                    self.snapshot = evaluate_market(&self.prices, self.net, self.wts)?;
                }
                Some((engine, tree)) => {
                    let affected = engine.update(
                        &mut self.snapshot,
                        loser,
                        self.prices.as_slice(),
                        self.net,
                        self.wts.edge_weights(),
                    );
                    for &i in affected {
                        tree.update(i, self.snapshot.profit());
                    }
                }
            }
        }

        if self.config.audit_interval > 0 && self.t.is_multiple_of(self.config.audit_interval) {
            self.audit()?;
        }

        Ok(StepRecord {
            t,
            loser,
            min_profit,
            mean_price,
            eta,
            renormalized,
        })
    }

    /// Compares the current snapshot and loser against a full evaluation.
    pub fn audit(&self) -> Result<()> {
        let full = evaluate_market(&self.prices, self.net, self.wts)?;
        let tol = 1e-10 * self.mean_price();
        let fields = [
            ("production", self.snapshot.production(), full.production()),
            ("demand", self.snapshot.demand(), full.demand()),
            ("traded", self.snapshot.traded(), full.traded()),
            ("profit", self.snapshot.profit(), full.profit()),
            ("wants", self.snapshot.wants(), full.wants()),
            ("shares", self.snapshot.shares(), full.shares()),
        ];
        for (name, a, b) in fields {
            if let Some(k) = a
                .iter()
                .zip(b)
                .position(|(x, y)| (x - y).abs() > tol.max(1e-10))
            {
                return Err(Error::Consistency(format!(
                    "step {}: {name}[{k}] is {} but full evaluation gives {}",
                    self.t, a[k], b[k]
                )));
            }
        }
        let want = find_loser(full.profit())?;
        if self.loser() != want {
            return Err(Error::Consistency(format!(
                "step {}: tracked loser {} but full evaluation gives {want}",
                self.t,
                self.loser()
            )));
        }
        Ok(())
    }

    /// Runs until `t == total_steps`, appending to `record` and calling
    /// `observe` with the market state at the start of every step.
    pub fn run_observed<F>(&mut self, record: &mut RunRecord, observe: F) -> Result<()>
    where
        F: FnMut(StepView<'_>),
    {
        self.run_until(self.config.total_steps, record, observe)
    }

    /// Like [`Simulation::run_observed`], stopping at `t == t_end` (capped at
    /// `total_steps`).
    pub fn run_until<F>(&mut self, t_end: u64, record: &mut RunRecord, mut observe: F) -> Result<()>
    where
        F: FnMut(StepView<'_>),
    {
        let t_end = t_end.min(self.config.total_steps);
        while self.t < t_end {
            observe(self.view());
            let profits = self.config.record_profits.then(|| {
                self.snapshot
                    .profit()
                    .iter()
                    .map(|s| s * self.scale)
                    .collect::<Vec<f64>>()
            });
            let rec = self.step()?;
            record.push(&rec, self.net.position(rec.loser), profits);
        }
        Ok(())
    }
}

/// Executes a full run from `t = 0` and returns its record.
pub fn run(net: &TradeNetwork, wts: &ExpenditureMatrix, config: &SimConfig) -> Result<RunRecord> {
    run_with_observer(net, wts, config, |_| {})
}

/// Like [`run`], with a per-step observer of the pre-cut market state.
pub fn run_with_observer<F>(
    net: &TradeNetwork,
    wts: &ExpenditureMatrix,
    config: &SimConfig,
    observe: F,
) -> Result<RunRecord>
where
    F: FnMut(StepView<'_>),
{
    let mut sim = Simulation::new(net, wts, config.clone())?;
    let mut record = RunRecord::new(
        net.extents().len(),
        config.transient_steps as usize,
        config.total_steps as usize,
    );
    sim.run_observed(&mut record, observe)?;
    Ok(record)
}

//! Local re-evaluation after a single price change.
//!
//! With one changed agent `c`, the dependency chain is:
//! - production and wants change for `A = {c} ∪ customers(c)`;
//! - demand and shares change for the suppliers `B` of `A`;
//! - traded quantities change on `A ∪ B`;
//! - profits change on `A ∪ B ∪ customers(A ∪ B)`.
//!
//! Each quantity is recomputed with the same kernel and summation order as
//! the full evaluation, so the result matches it exactly.

use crate::market::{
    demand_kernel, production_kernel, profit_kernel, shares_kernel, wants_kernel, MarketSnapshot,
    PriceVector,
};
use crate::topology::{ExpenditureMatrix, TradeNetwork};
use crate::{Error, Result};

/// Scratch space for repeated incremental updates on one network.
#[derive(Clone, Debug)]
pub struct IncrementalEngine {
    epoch: u32,
    mark_b: Vec<u32>,
    mark_t: Vec<u32>,
    mark_p: Vec<u32>,
    set_a: Vec<usize>,
    set_b: Vec<usize>,
    set_t: Vec<usize>,
    affected: Vec<usize>,
}

impl IncrementalEngine {
    pub fn new(n_agents: usize) -> Self {
        IncrementalEngine {
            epoch: 0,
            mark_b: vec![0; n_agents],
            mark_t: vec![0; n_agents],
            mark_p: vec![0; n_agents],
            set_a: Vec::new(),
            set_b: Vec::new(),
            set_t: Vec::new(),
            affected: Vec::new(),
        }
    }

    fn next_epoch(&mut self) {
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.mark_b.fill(0);
            self.mark_t.fill(0);
            self.mark_p.fill(0);
            self.epoch = 1;
        }
    }

    /// Updates `snap` in place after the price of `changed` moved. Returns the
    /// agents whose profit was recomputed, in discovery order.
    pub fn update(
        &mut self,
        snap: &mut MarketSnapshot,
        changed: usize,
        prices: &[f64],
        net: &TradeNetwork,
        weights: &[f64],
    ) -> &[usize] {
        self.next_epoch();
        let ep = self.epoch;

        self.set_a.clear();
        self.set_a.push(changed);
        self.set_a.extend_from_slice(net.customers(changed));

        self.set_b.clear();
        for &i in &self.set_a {
            let q = production_kernel(i, prices, net, weights);
            snap.production[i] = q;
            wants_kernel(i, q, prices, net, weights, &mut snap.wants);
            for &j in net.suppliers(i) {
                if self.mark_b[j] != ep {
                    self.mark_b[j] = ep;
                    self.set_b.push(j);
                }
            }
        }

        for &j in &self.set_b {
            snap.demand[j] = demand_kernel(j, net, &snap.wants);
        }

        self.set_t.clear();
        for &i in self.set_a.iter().chain(&self.set_b) {
            if self.mark_t[i] != ep {
                self.mark_t[i] = ep;
                self.set_t.push(i);
            }
        }
        for &i in &self.set_t {
            snap.traded[i] = snap.production[i].min(snap.demand[i]);
        }

        for &j in &self.set_b {
            shares_kernel(j, net, &snap.wants, &snap.demand, &mut snap.shares);
        }

        self.affected.clear();
        for &i in &self.set_t {
            if self.mark_p[i] != ep {
                self.mark_p[i] = ep;
                self.affected.push(i);
            }
            for &k in net.customers(i) {
                if self.mark_p[k] != ep {
                    self.mark_p[k] = ep;
                    self.affected.push(k);
                }
            }
        }
        for &i in &self.affected {
            snap.profit[i] = profit_kernel(i, prices, net, &snap.traded, &snap.shares);
        }
        &self.affected
    }
}

/// Snapshot after a single price change, recomputing only the affected
/// neighbourhood of `changed`. `prev` must be the exact snapshot of the
/// prices before the change; staleness is not detectable here and is caught
/// by the periodic audit in [`crate::dynamics::Simulation`].
pub fn incremental_evaluate(
    prev: &MarketSnapshot,
    changed: usize,
    prices: &PriceVector,
    net: &TradeNetwork,
    wts: &ExpenditureMatrix,
) -> Result<MarketSnapshot> {
    if prev.production.len() != net.n_agents() || prev.wants.len() != net.n_edges() {
        return Err(Error::Consistency(
            "snapshot does not belong to this network".into(),
        ));
    }
    if prices.len() != net.n_agents() {
        return Err(Error::DimensionMismatch {
            expected: net.n_agents(),
            got: prices.len(),
        });
    }
    if changed >= net.n_agents() {
        return Err(Error::InvalidParameter(format!(
            "agent {changed} out of range"
        )));
    }
    let mut snap = prev.clone();
    IncrementalEngine::new(net.n_agents()).update(
        &mut snap,
        changed,
        prices.as_slice(),
        net,
        wts.edge_weights(),
    );
    Ok(snap)
}

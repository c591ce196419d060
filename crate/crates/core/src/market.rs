//! One trading day: production optimum, intended wants, demand, traded
//! quantities, expenditure shares and profits.
//!
//! Each agent maximizes `u = -q^2/2 + sum_j 2 sqrt(q_j)` subject to spending
//! the fraction `a_ij` of its earnings `p_i q` on supplier `j`. The optimum is
//! `q^p_i = [sum_j sqrt(a_ij p_i / p_j)]^(2/3)` and the wants follow from the
//! budget as `q^w_ij = a_ij (p_i / p_j) q^p_i`. Supply and demand rarely
//! match, so only `min(q^p, q^W)` is traded and agents end the day with a
//! profit or loss. Profits sum to zero over the market.
//!
//! The per-agent kernels here are shared with the incremental engine in
//! [`crate::dynamics`]; both paths sum in the same order and therefore agree
//! bit for bit.

use crate::topology::{ExpenditureMatrix, TradeNetwork};
use crate::{Error, Result};

/// Strictly positive per-agent prices (money per unit good).
#[derive(Clone, Debug, PartialEq)]
pub struct PriceVector(Vec<f64>);

impl PriceVector {
    pub fn new(prices: Vec<f64>) -> Result<Self> {
        if let Some((i, p)) = prices
            .iter()
            .enumerate()
            .find(|(_, p)| !(**p > 0.0 && p.is_finite()))
        {
            return Err(Error::Domain(format!(
                "price of agent {i} is {p}, must be positive"
            )));
        }
        Ok(PriceVector(prices))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, agent: usize) -> f64 {
        self.0[agent]
    }

    pub fn set(&mut self, agent: usize, price: f64) -> Result<()> {
        if !(price > 0.0 && price.is_finite()) {
            return Err(Error::Domain(format!(
                "price of agent {agent} would become {price}"
            )));
        }
        self.0[agent] = price;
        Ok(())
    }

    /// Every price multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        PriceVector::new(self.0.iter().map(|p| p * factor).collect())
    }

    /// Divides every price by `divisor` in place.
    pub fn divide_all(&mut self, divisor: f64) -> Result<()> {
        if !(divisor > 0.0 && divisor.is_finite()) {
            return Err(Error::Domain(format!("price divisor {divisor}")));
        }
        self.0.iter_mut().for_each(|p| *p /= divisor);
        if let Some(i) = self.0.iter().position(|p| !(*p > 0.0 && p.is_finite())) {
            return Err(Error::Domain(format!(
                "price of agent {i} left the positive range"
            )));
        }
        Ok(())
    }

    pub fn mean(&self) -> f64 {
        self.0.iter().sum::<f64>() / self.0.len() as f64
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

/// Result of one full market evaluation. Per-edge vectors are indexed by
/// supplier edge id.
#[derive(Clone, Debug, PartialEq)]
pub struct MarketSnapshot {
    pub(crate) production: Vec<f64>,
    pub(crate) wants: Vec<f64>,
    pub(crate) demand: Vec<f64>,
    pub(crate) traded: Vec<f64>,
    pub(crate) shares: Vec<f64>,
    pub(crate) profit: Vec<f64>,
}

impl MarketSnapshot {
    /// `q^p_i`, goods units.
    pub fn production(&self) -> &[f64] {
        &self.production
    }

    /// `q^w_ij` per supplier edge, goods units.
    pub fn wants(&self) -> &[f64] {
        &self.wants
    }

    /// `q^W_i`, the summed wants of all customers of `i`.
    pub fn demand(&self) -> &[f64] {
        &self.demand
    }

    pub fn traded(&self) -> &[f64] {
        &self.traded
    }

    /// `b_ij = q^w_ij / q^W_j` per supplier edge.
    pub fn shares(&self) -> &[f64] {
        &self.shares
    }

    /// `s_i`, money units.
    pub fn profit(&self) -> &[f64] {
        &self.profit
    }

    /// Largest violation of each accounting identity.
    pub fn residuals(&self, prices: &PriceVector, net: &TradeNetwork) -> IdentityResiduals {
        let p = prices.as_slice();
        let mut budget: f64 = 0.0;
        let mut trade: f64 = 0.0;
        for i in 0..net.n_agents() {
            let spent: f64 = net
                .supplier_edges(i)
                .zip(net.suppliers(i))
                .map(|(e, &j)| p[j] * self.wants[e])
                .sum();
            let earned = p[i] * self.production[i];
            budget = budget.max((spent - earned).abs() / earned);
            trade = trade.max((self.traded[i] - self.production[i].min(self.demand[i])).abs());
        }
        let mut share: f64 = 0.0;
        for j in 0..net.n_agents() {
            if self.demand[j] > 0.0 {
                let s: f64 = net.customer_edges(j).iter().map(|&e| self.shares[e]).sum();
                share = share.max((s - 1.0).abs());
            }
        }
        let turnover: f64 = (0..net.n_agents()).map(|i| p[i] * self.traded[i]).sum();
        let total: f64 = self.profit.iter().sum();
        IdentityResiduals {
            budget_relative: budget,
            share_normalization: share,
            zero_sum_relative: if turnover > 0.0 {
                total.abs() / turnover
            } else {
                total.abs()
            },
            traded_min: trade,
        }
    }
}

/// Worst-case residuals of the snapshot identities; all should be ~1e-15.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IdentityResiduals {
    pub budget_relative: f64,
    pub share_normalization: f64,
    pub zero_sum_relative: f64,
    pub traded_min: f64,
}

impl IdentityResiduals {
    pub fn max(&self) -> f64 {
        self.budget_relative
            .max(self.share_normalization)
            .max(self.zero_sum_relative)
            .max(self.traded_min)
    }
}

pub(crate) fn production_kernel(
    agent: usize,
    prices: &[f64],
    net: &TradeNetwork,
    weights: &[f64],
) -> f64 {
    let pi = prices[agent];
    let mut sum = 0.0;
    for (e, &j) in net.supplier_edges(agent).zip(net.suppliers(agent)) {
        sum += (weights[e] * (pi / prices[j])).sqrt();
    }
    (sum * sum).cbrt()
}

pub(crate) fn wants_kernel(
    agent: usize,
    production: f64,
    prices: &[f64],
    net: &TradeNetwork,
    weights: &[f64],
    wants: &mut [f64],
) {
    let pi = prices[agent];
    for (e, &j) in net.supplier_edges(agent).zip(net.suppliers(agent)) {
        wants[e] = weights[e] * (pi / prices[j]) * production;
    }
}

pub(crate) fn demand_kernel(agent: usize, net: &TradeNetwork, wants: &[f64]) -> f64 {
    net.customer_edges(agent).iter().map(|&e| wants[e]).sum()
}

/// Shares on the customer edges of supplier `agent`.
pub(crate) fn shares_kernel(
    agent: usize,
    net: &TradeNetwork,
    wants: &[f64],
    demand: &[f64],
    shares: &mut [f64],
) {
    let d = demand[agent];
    for &e in net.customer_edges(agent) {
        shares[e] = if d > 0.0 { wants[e] / d } else { 0.0 };
    }
}

pub(crate) fn profit_kernel(
    agent: usize,
    prices: &[f64],
    net: &TradeNetwork,
    traded: &[f64],
    shares: &[f64],
) -> f64 {
    let mut spent = 0.0;
    for (e, &j) in net.supplier_edges(agent).zip(net.suppliers(agent)) {
        spent += shares[e] * prices[j] * traded[j];
    }
    prices[agent] * traded[agent] - spent
}

fn check_dims(prices: &PriceVector, net: &TradeNetwork, wts: &ExpenditureMatrix) -> Result<()> {
    if prices.len() != net.n_agents() {
        return Err(Error::DimensionMismatch {
            expected: net.n_agents(),
            got: prices.len(),
        });
    }
    if wts.edge_weights().len() != net.n_edges() {
        return Err(Error::DimensionMismatch {
            expected: net.n_edges(),
            got: wts.edge_weights().len(),
        });
    }
    Ok(())
}

/// Optimal production `q^p_i` for the current prices.
pub fn production_quantity(
    agent: usize,
    prices: &PriceVector,
    net: &TradeNetwork,
    wts: &ExpenditureMatrix,
) -> Result<f64> {
    check_dims(prices, net, wts)?;
    if net.in_degree(agent) == 0 {
        return Err(Error::TopologyMismatch(format!(
            "agent {agent} has no suppliers"
        )));
    }
    Ok(production_kernel(
        agent,
        prices.as_slice(),
        net,
        wts.edge_weights(),
    ))
}

/// Wants of `agent` from each of its suppliers, in supplier order.
pub fn intended_wants(
    agent: usize,
    production: f64,
    prices: &PriceVector,
    net: &TradeNetwork,
    wts: &ExpenditureMatrix,
) -> Result<Vec<f64>> {
    check_dims(prices, net, wts)?;
    let p = prices.as_slice();
    let pi = p[agent];
    Ok(wts
        .row(net, agent)
        .iter()
        .zip(net.suppliers(agent))
        .map(|(a, &j)| a * (pi / p[j]) * production)
        .collect())
}

/// Per-agent demand from per-edge wants.
pub fn net_demand(net: &TradeNetwork, wants: &[f64]) -> Vec<f64> {
    (0..net.n_agents())
        .map(|j| demand_kernel(j, net, wants))
        .collect()
}

pub fn traded_quantity(production: f64, demand: f64) -> f64 {
    production.min(demand)
}

/// Per-edge shares `b_ij = q^w_ij / q^W_j`, zero where the supplier has no demand.
pub fn expenditure_shares(net: &TradeNetwork, wants: &[f64], demand: &[f64]) -> Vec<f64> {
    let mut shares = vec![0.0; net.n_edges()];
    for j in 0..net.n_agents() {
        shares_kernel(j, net, wants, demand, &mut shares);
    }
    shares
}

pub fn profits(
    prices: &PriceVector,
    traded: &[f64],
    shares: &[f64],
    net: &TradeNetwork,
) -> Vec<f64> {
    (0..net.n_agents())
        .map(|i| profit_kernel(i, prices.as_slice(), net, traded, shares))
        .collect()
}

/// Full from-scratch evaluation of one trading day.
pub fn evaluate_market(
    prices: &PriceVector,
    net: &TradeNetwork,
    wts: &ExpenditureMatrix,
) -> Result<MarketSnapshot> {
    check_dims(prices, net, wts)?;
    let p = prices.as_slice();
    let w = wts.edge_weights();
    let n = net.n_agents();

    let production: Vec<f64> = (0..n).map(|i| production_kernel(i, p, net, w)).collect();
    let mut wants = vec![0.0; net.n_edges()];
    for i in 0..n {
        wants_kernel(i, production[i], p, net, w, &mut wants);
    }
    let demand = net_demand(net, &wants);
    let traded: Vec<f64> = production
        .iter()
        .zip(&demand)
        .map(|(&q, &d)| traded_quantity(q, d))
        .collect();
    let shares = expenditure_shares(net, &wants, &demand);
    let profit = profits(prices, &traded, &shares, net);

    Ok(MarketSnapshot {
        production,
        wants,
        demand,
        traded,
        shares,
        profit,
    })
}

/// `u = -q^2/2 + sum_j 2 sqrt(q_j)`.
pub fn utility(production: f64, consumptions: &[f64]) -> Result<f64> {
    if production < 0.0 || consumptions.iter().any(|&c| c < 0.0) {
        return Err(Error::Domain("utility needs nonnegative quantities".into()));
    }
    Ok(-production * production / 2.0 + consumptions.iter().map(|c| 2.0 * c.sqrt()).sum::<f64>())
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::topology::{
        assign_weights_fixed, assign_weights_uniform, build_corner_lattice, build_er_embedded,
        build_ring, Corner, NetworkKind, WeightScheme,
    };

    /// Straight-line evaluation on dense matrices, independent of the CSR kernels.
    /// `a[i][j]` is agent i's weight on supplier j (0 where no edge).
    fn dense_oracle(a: &[Vec<f64>], p: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let n = p.len();
        let mut qp = vec![0.0; n];
        for i in 0..n {
            let mut s = 0.0;
            for j in 0..n {
                if a[i][j] > 0.0 {
                    s += (a[i][j] * p[i] / p[j]).sqrt();
                }
            }
            qp[i] = s.powf(2.0 / 3.0);
        }
        let mut qw = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..n {
                qw[i][j] = a[i][j] * p[i] / p[j] * qp[i];
            }
        }
        let qd: Vec<f64> = (0..n).map(|j| (0..n).map(|i| qw[i][j]).sum()).collect();
        let qt: Vec<f64> = (0..n).map(|i| qp[i].min(qd[i])).collect();
        let mut s = vec![0.0; n];
        for i in 0..n {
            s[i] = p[i] * qt[i];
            for j in 0..n {
                if qd[j] > 0.0 {
                    s[i] -= qw[i][j] / qd[j] * p[j] * qt[j];
                }
            }
        }
        (qp, s)
    }

    fn dense_weights(net: &TradeNetwork, wts: &ExpenditureMatrix) -> Vec<Vec<f64>> {
        let n = net.n_agents();
        let mut a = vec![vec![0.0; n]; n];
        for i in 0..n {
            for (&j, &w) in net.suppliers(i).iter().zip(wts.row(net, i)) {
                a[i][j] = w;
            }
        }
        a
    }

    fn golden_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
        let g = (5f64.sqrt() - 1.0) / 2.0;
        for _ in 0..200 {
            let x1 = hi - g * (hi - lo);
            let x2 = lo + g * (hi - lo);
            if f(x1) < f(x2) {
                lo = x1;
            } else {
                hi = x2;
            }
        }
        (lo + hi) / 2.0
    }

    fn budget_utility(q: f64, a: &[f64], ratio: &[f64]) -> f64 {
        let cons: Vec<f64> = a.iter().zip(ratio).map(|(a, r)| a * r * q).collect();
        utility(q, &cons).unwrap()
    }

    #[test]
    fn production_closed_form_values() {
        let net = build_ring(5).unwrap();
        let prices = PriceVector::new(vec![1.0; 5]).unwrap();
        let wts = assign_weights_fixed(&net, 0.5).unwrap();
        let q = production_quantity(0, &prices, &net, &wts).unwrap();
        assert!((q - 2f64.powf(1.0 / 3.0)).abs() < 1e-12);
        assert!((q - 1.259921).abs() < 1e-6);

        let wts = assign_weights_fixed(&net, 0.25).unwrap();
        let q = production_quantity(0, &prices, &net, &wts).unwrap();
        assert!((q - (0.5 + 0.75f64.sqrt()).powf(2.0 / 3.0)).abs() < 1e-12);
        assert!((q - 1.2311355).abs() < 1e-6);

        // Golden-section maximization of the budget-constrained utility agrees.
        for a in [0.5, 0.25] {
            let w = [a, 1.0 - a];
            let best = golden_max(|q| budget_utility(q, &w, &[1.0, 1.0]), 1e-6, 10.0);
            let closed = ((w[0]).sqrt() + (w[1]).sqrt()).powf(2.0 / 3.0);
            assert!((best - closed).abs() < 1e-6, "{best} vs {closed}");
        }

        let one = TradeNetwork::from_suppliers(
            NetworkKind::Ring,
            vec![3],
            vec![vec![1], vec![2], vec![0]],
        )
        .unwrap();
        let wts =
            ExpenditureMatrix::from_edge_weights(&one, vec![1.0; 3], WeightScheme::FixedSplit(1.0))
                .unwrap();
        let prices = PriceVector::new(vec![2.0; 3]).unwrap();
        assert_eq!(production_quantity(0, &prices, &one, &wts).unwrap(), 1.0);
    }

    #[test]
    fn symmetric_ring_snapshot() {
        let net = build_ring(5).unwrap();
        let wts = assign_weights_fixed(&net, 0.5).unwrap();
        let prices = PriceVector::new(vec![10.0; 5]).unwrap();
        let snap = evaluate_market(&prices, &net, &wts).unwrap();
        let c = 2f64.powf(1.0 / 3.0);
        for i in 0..5 {
            assert!((snap.traded()[i] - c).abs() < 1e-12);
            assert!((snap.demand()[i] - c).abs() < 1e-12);
            assert!(snap.profit()[i].abs() < 1e-12);
        }
        for e in 0..net.n_edges() {
            assert!((snap.wants()[e] - 2f64.powf(-2.0 / 3.0)).abs() < 1e-12);
            assert!((snap.wants()[e] - 0.62996).abs() < 1e-5);
            assert!((snap.shares()[e] - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn wants_are_scale_free_and_zero_weight_gives_zero() {
        let net = build_ring(4).unwrap();
        let wts = assign_weights_fixed(&net, 0.3).unwrap();
        let prices = PriceVector::new(vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let q = production_quantity(1, &prices, &net, &wts).unwrap();
        let w1 = intended_wants(1, q, &prices, &net, &wts).unwrap();
        let doubled = prices.scaled(2.0).unwrap();
        let q2 = production_quantity(1, &doubled, &net, &wts).unwrap();
        let w2 = intended_wants(1, q2, &doubled, &net, &wts).unwrap();
        for (a, b) in w1.iter().zip(&w2) {
            assert!((a - b).abs() < 1e-14);
        }

        let zero = ExpenditureMatrix::from_edge_weights(
            &net,
            vec![0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0],
            WeightScheme::UniformRandom,
        )
        .unwrap();
        let w = intended_wants(2, 1.0, &prices, &net, &zero).unwrap();
        assert_eq!(w[0], 0.0);
    }

    #[test]
    fn zero_demand_and_single_customer_shares() {
        // 0 <- 1 <- 2, and 0 supplies 1 too; agent 2 has no customers besides 1.
        // Agent 3 supplies 2 only and has no customer... build explicitly.
        let net = TradeNetwork::from_suppliers(
            NetworkKind::ErEmbedded,
            vec![4],
            vec![vec![1], vec![0, 2], vec![1], vec![2]],
        )
        .unwrap();
        assert_eq!(net.out_degree(3), 0);
        let wts = assign_weights_uniform(&net, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        let prices = PriceVector::new(vec![1.0, 1.1, 0.9, 1.3]).unwrap();
        let snap = evaluate_market(&prices, &net, &wts).unwrap();
        assert_eq!(snap.demand()[3], 0.0);
        assert_eq!(snap.traded()[3], 0.0);
        // Agent 2 is supplied only to 1 and 3; agent 0 has a single customer (1).
        let e = net.customer_edges(0)[0];
        assert_eq!(snap.shares()[e], 1.0);
        let r = snap.residuals(&prices, &net);
        assert!(r.max() < 1e-12, "{r:?}");

        assert_eq!(traded_quantity(1.26, 1.26), 1.26);
        assert_eq!(traded_quantity(2.0, 0.5), 0.5);
        assert_eq!(traded_quantity(0.0, 3.0), 0.0);
        let shares = expenditure_shares(&net, &[1.0, 1.0, 1.0, 1.0, 1.0], &[0.0; 4]);
        assert!(shares.iter().all(|&b| b == 0.0));
    }

    #[test]
    fn three_cycle_matches_dense_oracle() {
        let net = TradeNetwork::from_suppliers(
            NetworkKind::Ring,
            vec![3],
            vec![vec![1], vec![2], vec![0]],
        )
        .unwrap();
        let wts =
            ExpenditureMatrix::from_edge_weights(&net, vec![1.0; 3], WeightScheme::FixedSplit(1.0))
                .unwrap();
        let p = vec![10.0, 10.5, 11.0];
        let prices = PriceVector::new(p.clone()).unwrap();
        let snap = evaluate_market(&prices, &net, &wts).unwrap();
        let (qp, s) = dense_oracle(&dense_weights(&net, &wts), &p);
        for i in 0..3 {
            assert!((snap.production()[i] - qp[i]).abs() < 1e-12);
            assert!((snap.profit()[i] - s[i]).abs() < 1e-12);
        }
        // Cheaper agent 0 overproduces relative to its single customer's want.
        assert!(s.iter().sum::<f64>().abs() < 1e-12);
        assert!(s.iter().any(|v| v.abs() > 1e-3));
    }

    #[test]
    fn random_instances_match_dense_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for _ in 0..50 {
            let n = rng.gen_range(2..25);
            let net = build_er_embedded(n, rng.gen_range(0.05..0.6), &mut rng).unwrap();
            let wts = assign_weights_uniform(&net, &mut rng).unwrap();
            let p: Vec<f64> = (0..n).map(|_| rng.gen_range(0.5..2.0)).collect();
            let prices = PriceVector::new(p.clone()).unwrap();
            let snap = evaluate_market(&prices, &net, &wts).unwrap();
            let (qp, s) = dense_oracle(&dense_weights(&net, &wts), &p);
            for i in 0..n {
                assert!((snap.production()[i] - qp[i]).abs() < 1e-12 * qp[i].max(1.0));
                assert!((snap.profit()[i] - s[i]).abs() < 1e-11);
            }
        }
    }

    #[test]
    fn utility_values() {
        assert_eq!(utility(0.0, &[0.0, 0.0]).unwrap(), 0.0);
        assert_eq!(utility(1.0, &[1.0]).unwrap(), 1.5);
        assert!(utility(-1.0, &[1.0]).is_err());
        assert!(utility(1.0, &[-0.1]).is_err());

        let (a, r): ([f64; 2], [f64; 2]) = ([0.3, 0.7], [1.2, 0.8]);
        let q = (a.iter().zip(&r).map(|(a, r)| (a * r).sqrt()).sum::<f64>()).powf(2.0 / 3.0);
        let at = budget_utility(q, &a, &r);
        assert!(at > budget_utility(q * 1.01, &a, &r));
        assert!(at > budget_utility(q * 0.99, &a, &r));
    }

    #[test]
    fn relabeling_permutes_snapshot() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let net = build_er_embedded(12, 0.3, &mut rng).unwrap();
        let wts = assign_weights_uniform(&net, &mut rng).unwrap();
        let p: Vec<f64> = (0..12).map(|_| rng.gen_range(1.0..2.0)).collect();
        let perm: Vec<usize> = (0..12).map(|i| (i * 5 + 3) % 12).collect(); // old -> new
        let mut lists = vec![Vec::new(); 12];
        let mut new_w = vec![Vec::new(); 12];
        let mut new_p = vec![0.0; 12];
        for i in 0..12 {
            lists[perm[i]] = net.suppliers(i).iter().map(|&j| perm[j]).collect();
            new_w[perm[i]] = wts.row(&net, i).to_vec();
            new_p[perm[i]] = p[i];
        }
        let pnet = TradeNetwork::from_suppliers(NetworkKind::ErEmbedded, vec![12], lists).unwrap();
        let pwts = ExpenditureMatrix::from_edge_weights(
            &pnet,
            new_w.concat(),
            WeightScheme::UniformRandom,
        )
        .unwrap();
        let a = evaluate_market(&PriceVector::new(p).unwrap(), &net, &wts).unwrap();
        let b = evaluate_market(&PriceVector::new(new_p).unwrap(), &pnet, &pwts).unwrap();
        for i in 0..12 {
            assert!((a.profit()[i] - b.profit()[perm[i]]).abs() < 1e-12);
            assert!((a.production()[i] - b.production()[perm[i]]).abs() < 1e-12);
            assert!((a.demand()[i] - b.demand()[perm[i]]).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_prices() {
        assert!(PriceVector::new(vec![1.0, 0.0]).is_err());
        assert!(PriceVector::new(vec![1.0, f64::NAN]).is_err());
        let mut p = PriceVector::new(vec![1.0]).unwrap();
        assert!(p.set(0, -2.0).is_err());
        let net = build_corner_lattice(3, Corner::RT).unwrap();
        let wts = assign_weights_fixed(&net, 0.5).unwrap();
        assert!(evaluate_market(&PriceVector::new(vec![1.0; 4]).unwrap(), &net, &wts).is_err());
    }

    proptest! {
        #[test]
        fn homogeneity(seed in any::<u64>(), lambda in prop::sample::select(vec![1e-3, 1.0, 1e3, 7.5])) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let net = build_er_embedded(30, 0.1, &mut rng).unwrap();
            let wts = assign_weights_uniform(&net, &mut rng).unwrap();
            let prices = PriceVector::new((0..30).map(|_| rng.gen_range(10.0..11.0)).collect()).unwrap();
            let a = evaluate_market(&prices, &net, &wts).unwrap();
            let b = evaluate_market(&prices.scaled(lambda).unwrap(), &net, &wts).unwrap();
            let scale = prices.as_slice().iter().zip(a.traded()).map(|(p, t)| p * t).fold(0.0, f64::max);
            for i in 0..30 {
                prop_assert!((a.production()[i] - b.production()[i]).abs() <= 1e-12 * a.production()[i]);
                prop_assert!((a.traded()[i] - b.traded()[i]).abs() <= 1e-12 * a.production()[i].max(a.traded()[i]));
                prop_assert!((b.profit()[i] - lambda * a.profit()[i]).abs() <= 1e-12 * lambda * scale);
            }
        }

        #[test]
        fn lowering_supplier_price_raises_customer_production(seed in any::<u64>(), cut in 0.001f64..0.5) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let net = build_er_embedded(20, 0.2, &mut rng).unwrap();
            let wts = assign_weights_uniform(&net, &mut rng).unwrap();
            let prices = PriceVector::new((0..20).map(|_| rng.gen_range(1.0..2.0)).collect()).unwrap();
            let j = rng.gen_range(0..20);
            let mut lowered = prices.clone();
            lowered.set(j, prices.get(j) * (1.0 - cut)).unwrap();
            for &i in net.customers(j) {
                let before = production_quantity(i, &prices, &net, &wts).unwrap();
                let after = production_quantity(i, &lowered, &net, &wts).unwrap();
                prop_assert!(after > before);
            }
        }
    }
}

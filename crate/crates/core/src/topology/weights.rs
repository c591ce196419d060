use rand::Rng;

use super::TradeNetwork;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum WeightScheme {
    /// First supplier gets `a`, second `1 - a`.
    FixedSplit(f64),
    UniformRandom,
}

/// Fraction of each agent's earnings spent on each supplier, aligned with
/// the network's supplier edges. Rows sum to one.
#[derive(Clone, Debug, PartialEq)]
pub struct ExpenditureMatrix {
    weights: Vec<f64>,
    scheme: WeightScheme,
}

impl ExpenditureMatrix {
    /// Wraps per-edge weights after checking alignment and row sums.
    pub fn from_edge_weights(
        net: &TradeNetwork,
        weights: Vec<f64>,
        scheme: WeightScheme,
    ) -> Result<Self> {
        if weights.len() != net.n_edges() {
            return Err(Error::DimensionMismatch {
                expected: net.n_edges(),
                got: weights.len(),
            });
        }
        for i in 0..net.n_agents() {
            let row = &weights[net.supplier_edges(i)];
            if row.iter().any(|w| !(*w >= 0.0)) {
                return Err(Error::InvalidParameter(format!(
                    "agent {i}: negative weight"
                )));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidParameter(format!(
                    "agent {i}: weights sum to {sum}"
                )));
            }
        }
        Ok(ExpenditureMatrix { weights, scheme })
    }

    pub fn scheme(&self) -> WeightScheme {
        self.scheme
    }

    /// All weights, indexed by edge id.
    pub fn edge_weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn row(&self, net: &TradeNetwork, agent: usize) -> &[f64] {
        &self.weights[net.supplier_edges(agent)]
    }
}

pub fn assign_weights_fixed(net: &TradeNetwork, a: f64) -> Result<ExpenditureMatrix> {
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "choice parameter must lie in (0, 1), got {a}"
        )));
    }
    let mut weights = Vec::with_capacity(net.n_edges());
    for i in 0..net.n_agents() {
        if net.in_degree(i) != 2 {
            return Err(Error::TopologyMismatch(format!(
                "fixed split needs 2 suppliers, agent {i} has {}",
                net.in_degree(i)
            )));
        }
        weights.push(a);
        weights.push(1.0 - a);
    }
    Ok(ExpenditureMatrix {
        weights,
        scheme: WeightScheme::FixedSplit(a),
    })
}

/// Independent uniforms on (0, 1] per edge, normalized per agent.
pub fn assign_weights_uniform<R: Rng + ?Sized>(
    net: &TradeNetwork,
    rng: &mut R,
) -> Result<ExpenditureMatrix> {
    let mut weights = Vec::with_capacity(net.n_edges());
    for i in 0..net.n_agents() {
        let start = weights.len();
        for _ in 0..net.in_degree(i) {
            weights.push(1.0 - rng.gen::<f64>());
        }
        let row = &mut weights[start..];
        let sum: f64 = row.iter().sum();
        row.iter_mut().for_each(|w| *w /= sum);
    }
    Ok(ExpenditureMatrix {
        weights,
        scheme: WeightScheme::UniformRandom,
    })
}

//! Directed trade networks, expenditure weights and spatial distances.
//!
//! An edge `j -> i` means agent `j` supplies agent `i`. Suppliers are the
//! primary adjacency; customer lists are always derived as their transpose.
//! Edges are numbered in supplier order (agent-major), and every per-edge
//! quantity in the crate (weights, wants, shares) is indexed by that number.

mod builders;
mod distance;
mod io;
mod weights;

use std::fmt;
use std::ops::Range;
use std::str::FromStr;

pub use builders::{
    build_corner_lattice, build_er_embedded, build_f_lattice, build_manhattan, build_ring,
};
pub use distance::{jump_distance, DistanceMode, Metric};
pub use io::{
    read_network, read_weights, write_network, write_weights, NETWORK_HEADER, WEIGHTS_HEADER,
};
pub use weights::{assign_weights_fixed, assign_weights_uniform, ExpenditureMatrix, WeightScheme};

use crate::{Error, Result};

/// Lattice direction of a supplier relative to the agent.
///
/// Declaration order is the canonical supplier precedence R, T, L, B.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Direction {
    Right,
    Top,
    Left,
    Bottom,
}

impl Direction {
    /// Lattice step `(dx, dy)`; top is `+y`.
    pub fn offset(self) -> (isize, isize) {
        match self {
            Direction::Right => (1, 0),
            Direction::Top => (0, 1),
            Direction::Left => (-1, 0),
            Direction::Bottom => (0, -1),
        }
    }
}

/// The four two-supplier corner configurations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Corner {
    RT,
    LT,
    LB,
    RB,
}

impl Corner {
    pub const ALL: [Corner; 4] = [Corner::RT, Corner::LT, Corner::LB, Corner::RB];

    /// Supplier directions in canonical order.
    pub fn directions(self) -> [Direction; 2] {
        match self {
            Corner::RT => [Direction::Right, Direction::Top],
            Corner::LT => [Direction::Top, Direction::Left],
            Corner::LB => [Direction::Left, Direction::Bottom],
            Corner::RB => [Direction::Right, Direction::Bottom],
        }
    }
}

impl fmt::Display for Corner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Corner::RT => "RT",
            Corner::LT => "LT",
            Corner::LB => "LB",
            Corner::RB => "RB",
        };
        f.write_str(s)
    }
}

impl FromStr for Corner {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "RT" => Ok(Corner::RT),
            "LT" => Ok(Corner::LT),
            "LB" => Ok(Corner::LB),
            "RB" => Ok(Corner::RB),
            other => Err(Error::InvalidParameter(format!("unknown corner {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NetworkKind {
    Ring,
    Manhattan,
    FLattice,
    Corner(Corner),
    ErEmbedded,
}

impl NetworkKind {
    /// Number of embedding dimensions.
    pub fn dims(self) -> usize {
        match self {
            NetworkKind::Ring | NetworkKind::ErEmbedded => 1,
            _ => 2,
        }
    }

    pub fn is_lattice(self) -> bool {
        !matches!(self, NetworkKind::ErEmbedded)
    }
}

impl fmt::Display for NetworkKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NetworkKind::Ring => f.write_str("ring"),
            NetworkKind::Manhattan => f.write_str("manhattan"),
            NetworkKind::FLattice => f.write_str("f_lattice"),
            NetworkKind::Corner(c) => write!(f, "corner_{}", c.to_string().to_lowercase()),
            NetworkKind::ErEmbedded => f.write_str("er_embedded"),
        }
    }
}

impl FromStr for NetworkKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ring" => Ok(NetworkKind::Ring),
            "manhattan" => Ok(NetworkKind::Manhattan),
            "f_lattice" => Ok(NetworkKind::FLattice),
            "er_embedded" => Ok(NetworkKind::ErEmbedded),
            other => match other.strip_prefix("corner_") {
                Some(c) => Ok(NetworkKind::Corner(c.parse()?)),
                None => Err(Error::InvalidParameter(format!(
                    "unknown network kind {other:?}"
                ))),
            },
        }
    }
}

/// Embedding coordinate of an agent: `[x]` in 1D, `[x, y]` in 2D.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Position {
    coords: [usize; 2],
    dims: u8,
}

impl Position {
    pub fn new_1d(x: usize) -> Self {
        Position {
            coords: [x, 0],
            dims: 1,
        }
    }

    pub fn new_2d(x: usize, y: usize) -> Self {
        Position {
            coords: [x, y],
            dims: 2,
        }
    }

    pub fn from_slice(coords: &[usize]) -> Result<Self> {
        match *coords {
            [x] => Ok(Position::new_1d(x)),
            [x, y] => Ok(Position::new_2d(x, y)),
            _ => Err(Error::DimensionMismatch {
                expected: 2,
                got: coords.len(),
            }),
        }
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.coords[..self.dims as usize]
    }

    pub fn dims(&self) -> usize {
        self.dims as usize
    }
}

/// Directed supplier/customer graph with a periodic spatial embedding.
#[derive(Clone, Debug, PartialEq)]
pub struct TradeNetwork {
    kind: NetworkKind,
    extents: Vec<usize>,
    supplier_offsets: Vec<usize>,
    suppliers: Vec<usize>,
    customer_offsets: Vec<usize>,
    customers: Vec<usize>,
    customer_edges: Vec<usize>,
}

impl TradeNetwork {
    /// Builds a network from per-agent supplier lists, deriving customers.
    ///
    /// Rejects self-edges, out-of-range indices, duplicate suppliers and
    /// supplier-less agents. `extents` must multiply to the agent count.
    pub fn from_suppliers(
        kind: NetworkKind,
        extents: Vec<usize>,
        supplier_lists: Vec<Vec<usize>>,
    ) -> Result<Self> {
        let n = supplier_lists.len();
        if extents.len() != kind.dims() {
            return Err(Error::DimensionMismatch {
                expected: kind.dims(),
                got: extents.len(),
            });
        }
        if extents.iter().product::<usize>() != n {
            return Err(Error::InvalidSize(format!(
                "extents {extents:?} do not match {n} agents"
            )));
        }

        let mut supplier_offsets = Vec::with_capacity(n + 1);
        let mut suppliers = Vec::new();
        supplier_offsets.push(0);
        for (i, list) in supplier_lists.iter().enumerate() {
            if list.is_empty() {
                return Err(Error::TopologyMismatch(format!(
                    "agent {i} has no suppliers"
                )));
            }
            for (k, &j) in list.iter().enumerate() {
                if j >= n {
                    return Err(Error::InvalidParameter(format!(
                        "agent {i}: supplier {j} out of range"
                    )));
                }
                if j == i {
                    return Err(Error::TopologyMismatch(format!(
                        "agent {i} supplies itself"
                    )));
                }
                if list[..k].contains(&j) {
                    return Err(Error::TopologyMismatch(format!(
                        "agent {i}: duplicate supplier {j}"
                    )));
                }
            }
            suppliers.extend_from_slice(list);
            supplier_offsets.push(suppliers.len());
        }

        // Transpose: counting pass, then fill in ascending customer order.
        let mut in_counts = vec![0usize; n];
        for &j in &suppliers {
            in_counts[j] += 1;
        }
        let mut customer_offsets = Vec::with_capacity(n + 1);
        customer_offsets.push(0);
        for c in &in_counts {
            customer_offsets.push(customer_offsets.last().unwrap() + c);
        }
        let mut fill = customer_offsets[..n].to_vec();
        let mut customers = vec![0; suppliers.len()];
        let mut customer_edges = vec![0; suppliers.len()];
        for i in 0..n {
            for e in supplier_offsets[i]..supplier_offsets[i + 1] {
                let j = suppliers[e];
                customers[fill[j]] = i;
                customer_edges[fill[j]] = e;
                fill[j] += 1;
            }
        }

        Ok(TradeNetwork {
            kind,
            extents,
            supplier_offsets,
            suppliers,
            customer_offsets,
            customers,
            customer_edges,
        })
    }

    pub fn kind(&self) -> NetworkKind {
        self.kind
    }

    pub fn n_agents(&self) -> usize {
        self.supplier_offsets.len() - 1
    }

    pub fn n_edges(&self) -> usize {
        self.suppliers.len()
    }

    /// Periodic linear sizes (L per dimension, or N for 1D embeddings).
    pub fn extents(&self) -> &[usize] {
        &self.extents
    }

    pub fn suppliers(&self, agent: usize) -> &[usize] {
        &self.suppliers[self.supplier_edges(agent)]
    }

    /// Edge ids of `agent`'s supplier edges, aligned with [`Self::suppliers`].
    pub fn supplier_edges(&self, agent: usize) -> Range<usize> {
        self.supplier_offsets[agent]..self.supplier_offsets[agent + 1]
    }

    /// Supplier at the tail of edge `edge`.
    pub fn edge_supplier(&self, edge: usize) -> usize {
        self.suppliers[edge]
    }

    pub fn customers(&self, agent: usize) -> &[usize] {
        &self.customers[self.customer_offsets[agent]..self.customer_offsets[agent + 1]]
    }

    /// Edge ids of the supplier edges pointing at `agent`, aligned with
    /// [`Self::customers`].
    pub fn customer_edges(&self, agent: usize) -> &[usize] {
        &self.customer_edges[self.customer_offsets[agent]..self.customer_offsets[agent + 1]]
    }

    pub fn in_degree(&self, agent: usize) -> usize {
        self.supplier_offsets[agent + 1] - self.supplier_offsets[agent]
    }

    pub fn out_degree(&self, agent: usize) -> usize {
        self.customer_offsets[agent + 1] - self.customer_offsets[agent]
    }

    pub fn position(&self, agent: usize) -> Position {
        match self.extents.as_slice() {
            [_] => Position::new_1d(agent),
            [l, _] => Position::new_2d(agent % l, agent / l),
            _ => unreachable!("embedding is 1D or 2D"),
        }
    }

    /// Per-agent supplier lists, in canonical order.
    pub fn supplier_lists(&self) -> Vec<Vec<usize>> {
        (0..self.n_agents())
            .map(|i| self.suppliers(i).to_vec())
            .collect()
    }
}

use rand::Rng;

use super::{Corner, Direction, NetworkKind, TradeNetwork};
use crate::{Error, Result};

/// 1D ring: every agent buys from its left and right neighbors.
pub fn build_ring(n_agents: usize) -> Result<TradeNetwork> {
    if n_agents < 3 {
        return Err(Error::InvalidSize(format!(
            "ring needs at least 3 agents, got {n_agents}"
        )));
    }
    let n = n_agents;
    let lists = (0..n).map(|i| vec![(i + n - 1) % n, (i + 1) % n]).collect();
    TradeNetwork::from_suppliers(NetworkKind::Ring, vec![n], lists)
}

fn neighbor(l: usize, x: usize, y: usize, dir: Direction) -> usize {
    let (dx, dy) = dir.offset();
    let nx = (x as isize + dx).rem_euclid(l as isize) as usize;
    let ny = (y as isize + dy).rem_euclid(l as isize) as usize;
    ny * l + nx
}

fn build_square(
    l: usize,
    kind: NetworkKind,
    corner_at: impl Fn(usize, usize) -> [Direction; 2],
) -> Result<TradeNetwork> {
    let mut lists = Vec::with_capacity(l * l);
    for y in 0..l {
        for x in 0..l {
            let mut dirs = corner_at(x, y);
            dirs.sort();
            lists.push(dirs.iter().map(|&d| neighbor(l, x, y, d)).collect());
        }
    }
    TradeNetwork::from_suppliers(kind, vec![l, l], lists)
}

/// Square lattice where every agent has suppliers in the same two directions.
pub fn build_corner_lattice(l: usize, corner: Corner) -> Result<TradeNetwork> {
    if l < 3 {
        return Err(Error::InvalidSize(format!(
            "lattice side must be >= 3, got {l}"
        )));
    }
    build_square(l, NetworkKind::Corner(corner), |_, _| corner.directions())
}

fn check_even_side(l: usize) -> Result<()> {
    if l < 4 || !l.is_multiple_of(2) {
        return Err(Error::InvalidSize(format!(
            "lattice side must be even and >= 4, got {l}"
        )));
    }
    Ok(())
}

/// Corner type of a Manhattan lattice site: horizontal supplier alternates
/// by row, vertical supplier alternates by column. Yields the 2x2 tile
/// `{RT, RB; LT, LB}` so each unit plaquette cycles through all four corners.
pub fn manhattan_corner(x: usize, y: usize) -> Corner {
    match (x % 2, y % 2) {
        (0, 0) => Corner::RT,
        (1, 0) => Corner::RB,
        (1, 1) => Corner::LB,
        _ => Corner::LT,
    }
}

pub fn build_manhattan(l: usize) -> Result<TradeNetwork> {
    check_even_side(l)?;
    build_square(l, NetworkKind::Manhattan, |x, y| {
        manhattan_corner(x, y).directions()
    })
}

/// Checkerboard: even `x + y` buys left/right, odd buys top/bottom.
pub fn build_f_lattice(l: usize) -> Result<TradeNetwork> {
    check_even_side(l)?;
    build_square(l, NetworkKind::FLattice, |x, y| {
        if (x + y) % 2 == 0 {
            [Direction::Left, Direction::Right]
        } else {
            [Direction::Top, Direction::Bottom]
        }
    })
}

/// Directed Erdős–Rényi graph on a 1D index embedding.
///
/// Each ordered pair carries a supplier edge with probability `alpha`
/// (draws in row-major order). Agents left without suppliers get exactly one
/// uniformly chosen supplier.
pub fn build_er_embedded<R: Rng + ?Sized>(
    n_agents: usize,
    alpha: f64,
    rng: &mut R,
) -> Result<TradeNetwork> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "alpha must lie in (0, 1), got {alpha}"
        )));
    }
    if n_agents < 2 {
        return Err(Error::InvalidSize(format!(
            "ER network needs >= 2 agents, got {n_agents}"
        )));
    }
    let n = n_agents;
    let mut lists: Vec<Vec<usize>> = Vec::with_capacity(n);
    for i in 0..n {
        let mut row: Vec<usize> = (0..n)
            .filter(|&j| j != i && rng.gen::<f64>() < alpha)
            .collect();
        if row.is_empty() {
            let mut j = rng.gen_range(0..n - 1);
            if j >= i {
                j += 1;
            }
            row.push(j);
        }
        lists.push(row);
    }
    TradeNetwork::from_suppliers(NetworkKind::ErEmbedded, vec![n], lists)
}

//! Line-oriented text formats for networks and expenditure weights.
//!
//! Network:
//! ```text
//! soc-market-net v1
//! N <n>
//! KIND <tag>
//! EXTENTS <l1> [l2]
//! <i> : <supplier> <supplier> ...
//! ```
//! Weights:
//! ```text
//! soc-market-wts v1
//! <i> : <weight> <weight> ...
//! ```
//! Weights are aligned with the supplier order of the network file and
//! written in shortest round-trip form.

use std::io::{BufRead, Write};

use super::{ExpenditureMatrix, NetworkKind, TradeNetwork, WeightScheme};
use crate::{Error, Result};

pub const NETWORK_HEADER: &str = "soc-market-net v1";
pub const WEIGHTS_HEADER: &str = "soc-market-wts v1";

pub fn write_network<W: Write>(net: &TradeNetwork, mut out: W) -> Result<()> {
    writeln!(out, "{NETWORK_HEADER}")?;
    writeln!(out, "N {}", net.n_agents())?;
    writeln!(out, "KIND {}", net.kind())?;
    let ext: Vec<String> = net.extents().iter().map(|e| e.to_string()).collect();
    writeln!(out, "EXTENTS {}", ext.join(" "))?;
    for i in 0..net.n_agents() {
        let s: Vec<String> = net.suppliers(i).iter().map(|j| j.to_string()).collect();
        writeln!(out, "{i} : {}", s.join(" "))?;
    }
    Ok(())
}

pub fn write_weights<W: Write>(
    net: &TradeNetwork,
    wts: &ExpenditureMatrix,
    mut out: W,
) -> Result<()> {
    writeln!(out, "{WEIGHTS_HEADER}")?;
    for i in 0..net.n_agents() {
        let s: Vec<String> = wts.row(net, i).iter().map(|w| w.to_string()).collect();
        writeln!(out, "{i} : {}", s.join(" "))?;
    }
    Ok(())
}

struct Lines<R> {
    inner: std::io::Lines<R>,
    line: usize,
}

impl<R: BufRead> Lines<R> {
    fn next_line(&mut self) -> Result<Option<String>> {
        loop {
            match self.inner.next() {
                None => return Ok(None),
                Some(l) => {
                    self.line += 1;
                    let l = l?;
                    if !l.trim().is_empty() {
                        return Ok(Some(l));
                    }
                }
            }
        }
    }

    fn expect_line(&mut self, what: &str) -> Result<String> {
        self.next_line()?
            .ok_or_else(|| self.err(format!("missing {what}")))
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Parse {
            line: self.line,
            msg: msg.into(),
        }
    }

    fn keyword<'a>(&self, line: &'a str, key: &str) -> Result<&'a str> {
        line.strip_prefix(key)
            .and_then(|rest| rest.strip_prefix(' '))
            .map(str::trim)
            .ok_or_else(|| self.err(format!("expected {key}")))
    }

    /// Parses `<i> : <values...>` and checks the row index.
    fn row<T: std::str::FromStr>(&self, line: &str, expected: usize) -> Result<Vec<T>> {
        let (idx, rest) = line
            .split_once(':')
            .ok_or_else(|| self.err("expected `<i> : ...`"))?;
        let idx: usize = idx.trim().parse().map_err(|_| self.err("bad row index"))?;
        if idx != expected {
            return Err(self.err(format!("expected row {expected}, found {idx}")));
        }
        rest.split_whitespace()
            .map(|tok| {
                tok.parse::<T>()
                    .map_err(|_| self.err(format!("bad value {tok:?}")))
            })
            .collect()
    }
}

pub fn read_network<R: BufRead>(input: R) -> Result<TradeNetwork> {
    let mut lines = Lines {
        inner: input.lines(),
        line: 0,
    };
    let header = lines.expect_line("header")?;
    if header.trim() != NETWORK_HEADER {
        return Err(lines.err(format!("expected header {NETWORK_HEADER:?}")));
    }
    let l = lines.expect_line("N")?;
    let n: usize = lines
        .keyword(&l, "N")?
        .parse()
        .map_err(|_| lines.err("bad N"))?;
    let l = lines.expect_line("KIND")?;
    let kind: NetworkKind = lines.keyword(&l, "KIND")?.parse()?;
    let l = lines.expect_line("EXTENTS")?;
    let extents = lines
        .keyword(&l, "EXTENTS")?
        .split_whitespace()
        .map(|t| t.parse::<usize>().map_err(|_| lines.err("bad extent")))
        .collect::<Result<Vec<_>>>()?;
    let mut lists = Vec::with_capacity(n);
    for i in 0..n {
        let l = lines.expect_line("agent row")?;
        lists.push(lines.row::<usize>(&l, i)?);
    }
    if lines.next_line()?.is_some() {
        return Err(lines.err("trailing data after agent rows"));
    }
    TradeNetwork::from_suppliers(kind, extents, lists)
}

pub fn read_weights<R: BufRead>(
    net: &TradeNetwork,
    scheme: WeightScheme,
    input: R,
) -> Result<ExpenditureMatrix> {
    let mut lines = Lines {
        inner: input.lines(),
        line: 0,
    };
    let header = lines.expect_line("header")?;
    if header.trim() != WEIGHTS_HEADER {
        return Err(lines.err(format!("expected header {WEIGHTS_HEADER:?}")));
    }
    let mut weights = Vec::with_capacity(net.n_edges());
    for i in 0..net.n_agents() {
        let l = lines.expect_line("agent row")?;
        let row = lines.row::<f64>(&l, i)?;
        if row.len() != net.in_degree(i) {
            return Err(lines.err(format!(
                "agent {i}: {} weights for {} suppliers",
                row.len(),
                net.in_degree(i)
            )));
        }
        weights.extend(row);
    }
    ExpenditureMatrix::from_edge_weights(net, weights, scheme)
}

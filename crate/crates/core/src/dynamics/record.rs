//! Per-step run records and their columnar text form.
//!
//! ```text
//! # soc-market-record v1
//! # config_hash <hex>
//! # seed <u64>
//! # transient <steps>
//! # extents <l1> [l2]
//! t loser_idx pos0 [pos1] min_profit mean_price renorm_flag
//! 0 17 17 -0.0123 10.49 0
//! ```
//! Reals are written in shortest round-trip form, so a read-back record is
//! bit-identical to the one written.

use std::io::{BufRead, Write};

use crate::topology::Position;
use crate::{Error, Result};

pub const RECORD_HEADER: &str = "# soc-market-record v1";

/// Outcome of one step, in original price units.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepRecord {
    pub t: u64,
    pub loser: usize,
    pub min_profit: f64,
    pub mean_price: f64,
    pub eta: f64,
    /// Prices were renormalized after this step's cut.
    pub renormalized: bool,
}

/// Time series of one run. The first `transient` entries are burn-in.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunRecord {
    pub dims: usize,
    pub transient: usize,
    pub loser_index: Vec<usize>,
    pub loser_position: Vec<Position>,
    pub min_profit: Vec<f64>,
    pub mean_price: Vec<f64>,
    pub renormalized: Vec<bool>,
    pub profits_stream: Option<Vec<Vec<f64>>>,
}

impl RunRecord {
    pub fn new(dims: usize, transient: usize, capacity: usize) -> Self {
        RunRecord {
            dims,
            transient,
            loser_index: Vec::with_capacity(capacity),
            loser_position: Vec::with_capacity(capacity),
            min_profit: Vec::with_capacity(capacity),
            mean_price: Vec::with_capacity(capacity),
            renormalized: Vec::with_capacity(capacity),
            profits_stream: None,
        }
    }

    pub fn len(&self) -> usize {
        self.loser_index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.loser_index.is_empty()
    }

    pub fn push(&mut self, step: &StepRecord, position: Position, profits: Option<Vec<f64>>) {
        self.loser_index.push(step.loser);
        self.loser_position.push(position);
        self.min_profit.push(step.min_profit);
        self.mean_price.push(step.mean_price);
        self.renormalized.push(step.renormalized);
        if let Some(p) = profits {
            self.profits_stream.get_or_insert_with(Vec::new).push(p);
        }
    }

    /// Keeps only the first `len` steps.
    pub fn truncate(&mut self, len: usize) {
        self.loser_index.truncate(len);
        self.loser_position.truncate(len);
        self.min_profit.truncate(len);
        self.mean_price.truncate(len);
        self.renormalized.truncate(len);
        if let Some(p) = &mut self.profits_stream {
            p.truncate(len);
        }
    }

    fn window(&self) -> std::ops::Range<usize> {
        self.transient.min(self.len())..self.len()
    }

    pub fn post_transient_positions(&self) -> &[Position] {
        &self.loser_position[self.window()]
    }

    pub fn post_transient_losers(&self) -> &[usize] {
        &self.loser_index[self.window()]
    }

    pub fn post_transient_min_profit(&self) -> &[f64] {
        &self.min_profit[self.window()]
    }

    pub fn post_transient_mean_price(&self) -> &[f64] {
        &self.mean_price[self.window()]
    }
}

/// Provenance carried in the record's comment header.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RecordMeta {
    pub config_hash: String,
    pub seed: u64,
    pub extents: Vec<usize>,
}

pub fn write_record<W: Write>(record: &RunRecord, meta: &RecordMeta, mut out: W) -> Result<()> {
    write_record_header(meta, record.dims, record.transient, &mut out)?;
    write_record_rows(record, 0..record.len(), out)
}

/// Comment header and column line; rows can then be appended in pieces
/// with [`write_record_rows`].
pub fn write_record_header<W: Write>(
    meta: &RecordMeta,
    dims: usize,
    transient: usize,
    mut out: W,
) -> Result<()> {
    writeln!(out, "{RECORD_HEADER}")?;
    writeln!(out, "# config_hash {}", meta.config_hash)?;
    writeln!(out, "# seed {}", meta.seed)?;
    writeln!(out, "# transient {transient}")?;
    let ext: Vec<String> = meta.extents.iter().map(|e| e.to_string()).collect();
    writeln!(out, "# extents {}", ext.join(" "))?;
    let pos_cols: Vec<String> = (0..dims).map(|k| format!("pos{k}")).collect();
    writeln!(
        out,
        "t loser_idx {} min_profit mean_price renorm_flag",
        pos_cols.join(" ")
    )?;
    Ok(())
}

pub fn write_record_rows<W: Write>(
    record: &RunRecord,
    rows: std::ops::Range<usize>,
    mut out: W,
) -> Result<()> {
    if rows.end > record.len() {
        return Err(Error::InvalidParameter(format!(
            "rows {rows:?} beyond record of length {}",
            record.len()
        )));
    }
    for t in rows {
        write!(out, "{t} {}", record.loser_index[t])?;
        for c in record.loser_position[t].as_slice() {
            write!(out, " {c}")?;
        }
        writeln!(
            out,
            " {} {} {}",
            record.min_profit[t],
            record.mean_price[t],
            u8::from(record.renormalized[t])
        )?;
    }
    Ok(())
}

pub fn read_record<R: BufRead>(input: R) -> Result<(RecordMeta, RunRecord)> {
    let mut meta = RecordMeta::default();
    let mut record = RunRecord::default();
    let mut dims = None;
    let err = |line: usize, msg: &str| Error::Parse {
        line,
        msg: msg.to_string(),
    };

    for (k, line) in input.lines().enumerate() {
        let line = line?;
        let lineno = k + 1;
        if k == 0 {
            if line.trim() != RECORD_HEADER {
                return Err(err(lineno, "missing record header"));
            }
            continue;
        }
        if let Some(rest) = line.strip_prefix("# ") {
            let (key, value) = rest.split_once(' ').unwrap_or((rest, ""));
            match key {
                "config_hash" => meta.config_hash = value.to_string(),
                "seed" => meta.seed = value.parse().map_err(|_| err(lineno, "bad seed"))?,
                "transient" => {
                    record.transient = value.parse().map_err(|_| err(lineno, "bad transient"))?
                }
                "extents" => {
                    meta.extents = value
                        .split_whitespace()
                        .map(|v| v.parse().map_err(|_| err(lineno, "bad extent")))
                        .collect::<Result<_>>()?
                }
                _ => {}
            }
            continue;
        }
        if line.starts_with("t ") {
            let n_pos = line
                .split_whitespace()
                .filter(|c| c.starts_with("pos"))
                .count();
            dims = Some(n_pos);
            record.dims = n_pos;
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let d = dims.ok_or_else(|| err(lineno, "data before column header"))?;
        let cols: Vec<&str> = line.split_whitespace().collect();
        if cols.len() != 5 + d {
            return Err(err(lineno, "wrong column count"));
        }
        let t: usize = cols[0].parse().map_err(|_| err(lineno, "bad t"))?;
        if t != record.len() {
            return Err(err(lineno, "steps out of order"));
        }
        record
            .loser_index
            .push(cols[1].parse().map_err(|_| err(lineno, "bad loser"))?);
        let coords: Vec<usize> = cols[2..2 + d]
            .iter()
            .map(|c| c.parse().map_err(|_| err(lineno, "bad position")))
            .collect::<Result<_>>()?;
        record.loser_position.push(Position::from_slice(&coords)?);
        record.min_profit.push(
            cols[2 + d]
                .parse()
                .map_err(|_| err(lineno, "bad min_profit"))?,
        );
        record.mean_price.push(
            cols[3 + d]
                .parse()
                .map_err(|_| err(lineno, "bad mean_price"))?,
        );
        record.renormalized.push(match cols[4 + d] {
            "0" => false,
            "1" => true,
            _ => return Err(err(lineno, "bad renorm_flag")),
        });
    }
    Ok((meta, record))
}

//! Agents on a directed trade network produce one good each and buy from
//! their suppliers with a fixed expenditure split. Every trading day the
//! agent with the smallest profit cuts its price by a random fraction. The
//! market self-organizes into a critical state whose avalanche statistics
//! are extracted by [`analysis`].
//!
//! Module map:
//! - [`topology`]: ring, square-lattice and random directed networks plus
//!   expenditure weights and periodic distances.
//! - [`market`]: one trading-day evaluation (production, wants, demand,
//!   trade, shares, profit).
//! - [`dynamics`]: extremal price dynamics with a full and an incremental
//!   evaluation engine, run records and checkpoints.
//! - [`analysis`]: profit rescaling, activity signal, avalanches, log
//!   binning, power-law fits, loser-jump statistics and decay-rate fits.

pub mod analysis;
pub mod dynamics;
mod error;
pub mod market;
pub mod topology;

pub use error::{Error, Result};

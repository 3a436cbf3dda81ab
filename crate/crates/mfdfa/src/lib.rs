//! MFDFA of exchange-rate return series with surrogate-based attribution of
//! the multifractality, built on [`mfdfa_core`].
//!
//! This crate adds what the core leaves out: shuffled and phase-randomized
//! surrogate ensembles, CSV ingestion, JSON and TSV output, and the `mfdfa`
//! command line.

pub mod analysis;
mod error;
pub mod ingest;
pub mod pipeline;
pub mod report;
pub mod surrogates;
pub mod synth;
pub mod verify;

pub use error::{Error, Result};
pub use mfdfa_core as core;

/// Environment variable naming the default directory for input files.
pub const DATA_DIR_ENV: &str = "MFDFA_DATA_DIR";

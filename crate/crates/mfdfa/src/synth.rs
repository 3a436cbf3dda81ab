//! Writing synthetic return series to disk.

use std::fmt::Write as _;
use std::path::Path;

use mfdfa_core::synth::cascade_values;
use mfdfa_core::{student_t, white_noise, ReturnSeries};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SynthModel {
    WhiteNoise { length: usize },
    StudentT { length: usize, dof: f64 },
    /// Binomial cascade of length `2^levels`.
    Cascade { levels: u32, weight: f64 },
}

pub fn generate(model: SynthModel, seed: u64) -> Result<ReturnSeries> {
    let ctx = |e| Error::analysis("synth", e);
    match model {
        SynthModel::WhiteNoise { length } => white_noise(length, seed).map_err(ctx),
        SynthModel::StudentT { length, dof } => student_t(length, dof, seed).map_err(ctx),
        SynthModel::Cascade { levels, weight } => {
            // Files may hold cascades shorter than the analysis oracle allows.
            if !(1..=mfdfa_core::CascadeParams::MAX_LEVELS).contains(&levels) {
                return Err(Error::Config(format!("cascade levels {levels} outside 1..=24")));
            }
            if !(weight > 0.5 && weight < 1.0) {
                return Err(Error::Config(format!("cascade weight {weight} outside (0.5, 1)")));
            }
            ReturnSeries::new(cascade_values(levels, weight)).map_err(ctx)
        }
    }
}

/// Single-column text: a `returns` header, then one value per line in
/// shortest round-trip form.
pub fn returns_text(series: &ReturnSeries) -> String {
    let mut out = String::with_capacity(series.len() * 24 + 8);
    out.push_str("returns\n");
    for v in series.values() {
        let _ = writeln!(out, "{v}");
    }
    out
}

pub fn synth_command(model: SynthModel, seed: u64, out: &Path) -> Result<ReturnSeries> {
    let series = generate(model, seed)?;
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    std::fs::write(out, returns_text(&series)).map_err(|e| Error::io(out, e))?;
    Ok(series)
}

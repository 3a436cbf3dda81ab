//! Serialization of analysis reports and plot data.

use std::fmt::Write as _;
use std::io::{self, Write};
use std::path::Path;

use mfdfa_core::{HurstSpectrum, MassExponentCurve, SingularitySpectrum};
use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::error::{Error, Result};
use crate::pipeline::AnalysisReport;
use crate::surrogates::SurrogateKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    /// Self-describing JSON with every float at 17 significant digits.
    Json,
    /// Tab-separated width table, one row per series.
    Table,
}

/// Pretty JSON that prints floats as `d.dddddddddddddddde±x`.
struct FullPrecision<'a> {
    inner: PrettyFormatter<'a>,
}

macro_rules! delegate {
    ($($name:ident($($arg:ident: $ty:ty),*);)*) => {
        $(fn $name<W: ?Sized + Write>(&mut self, writer: &mut W $(, $arg: $ty)*) -> io::Result<()> {
            self.inner.$name(writer $(, $arg)*)
        })*
    };
}

impl Formatter for FullPrecision<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }

    delegate! {
        begin_array();
        end_array();
        begin_array_value(first: bool);
        end_array_value();
        begin_object();
        end_object();
        begin_object_key(first: bool);
        begin_object_value();
        end_object_value();
    }
}

pub fn to_json(report: &AnalysisReport) -> Result<String> {
    let mut buf = Vec::new();
    let fmt = FullPrecision { inner: PrettyFormatter::with_indent(b"  ") };
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, fmt);
    report.serialize(&mut ser)?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json writes UTF-8"))
}

pub fn from_json(text: &str) -> Result<AnalysisReport> {
    Ok(serde_json::from_str(text)?)
}

pub fn read_report(path: &Path) -> Result<AnalysisReport> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    from_json(&text)
}

/// Width table in the layout original / shuffled / phase randomized. Only
/// the surrogate kinds present in the run get a column.
pub fn summary_table(report: &AnalysisReport) -> String {
    let kinds: Vec<SurrogateKind> = [SurrogateKind::Shuffle, SurrogateKind::PhaseRandomize]
        .into_iter()
        .filter(|k| report.config.surrogates.contains(k))
        .collect();
    let mut out = String::from("Series\tOriginal");
    for k in &kinds {
        out.push_str(match k {
            SurrogateKind::Shuffle => "\tShuffled",
            SurrogateKind::PhaseRandomize => "\tPhaseRandomized",
        });
    }
    out.push('\n');
    for row in &report.summary {
        let _ = write!(out, "{}\t{}", row.series, row.original);
        for k in &kinds {
            let v = match k {
                SurrogateKind::Shuffle => row.shuffled,
                SurrogateKind::PhaseRandomize => row.phase_randomized,
            };
            match v {
                Some(v) => {
                    let _ = write!(out, "\t{v}");
                }
                None => out.push('\t'),
            }
        }
        out.push('\n');
    }
    out
}

pub fn emit_report(report: &AnalysisReport, path: &Path, format: ReportFormat) -> Result<()> {
    let text = match format {
        ReportFormat::Json => to_json(report)?,
        ReportFormat::Table => summary_table(report),
    };
    write_file(path, &text)
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// File-name-safe version of a series label.
pub fn file_stem(name: &str) -> String {
    name.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' { c } else { '_' }).collect()
}

/// Indices of the q values shown in the scaling plot: the lowest, the one
/// closest to zero, and the highest.
fn scaling_plot_rows(q: &[f64]) -> Vec<usize> {
    let zero = (0..q.len()).min_by(|&a, &b| q[a].abs().total_cmp(&q[b].abs())).unwrap_or(0);
    let mut rows = vec![0, zero, q.len() - 1];
    rows.dedup();
    rows
}

pub fn scaling_table(scales: &[usize], q: &[f64], log_f: &[Vec<f64>]) -> String {
    let rows = scaling_plot_rows(q);
    let mut out = String::from("ln_a");
    for &i in &rows {
        let _ = write!(out, "\tln_F_q={}", q[i]);
    }
    out.push('\n');
    for (ia, &a) in scales.iter().enumerate() {
        let _ = write!(out, "{}", (a as f64).ln());
        for &i in &rows {
            let _ = write!(out, "\t{}", log_f[i][ia]);
        }
        out.push('\n');
    }
    out
}

pub fn hurst_table(h: &HurstSpectrum) -> String {
    let mut out = String::from("q\th\tslope_stderr\tr_squared\n");
    for ((q, h), d) in h.q_values.iter().zip(&h.h).zip(&h.diagnostics) {
        let _ = writeln!(out, "{q}\t{h}\t{}\t{}", d.slope_stderr, d.r_squared);
    }
    out
}

pub fn mass_table(tau: &MassExponentCurve) -> String {
    let mut out = String::from("q\ttau\n");
    for (q, t) in tau.q_values.iter().zip(&tau.tau) {
        let _ = writeln!(out, "{q}\t{t}");
    }
    out
}

pub fn spectrum_table(spec: &SingularitySpectrum) -> String {
    let mut out = String::from("q\talpha\tf_alpha\n");
    for p in &spec.points {
        let _ = writeln!(out, "{}\t{}\t{}", p.q, p.alpha, p.f_alpha);
    }
    out
}

/// Writes `<series>_{scaling,hurst,mass,spectrum}.tsv` for every series and,
/// from the ensemble means, for every surrogate ensemble
/// (`<series>_<kind>_*.tsv`).
pub fn emit_plot_data(report: &AnalysisReport, dir: &Path) -> Result<()> {
    for s in &report.series {
        let stem = file_stem(&s.name);
        let log_f: Vec<Vec<f64>> = (0..s.fluctuation.q_values.len()).map(|i| s.fluctuation.log_row(i)).collect();
        write_set(
            dir,
            &stem,
            &scaling_table(&s.fluctuation.scales, &s.fluctuation.q_values, &log_f),
            &s.original.hurst,
            &s.original.mass,
            &s.original.singularity,
        )?;
        for e in &s.surrogates {
            write_set(
                dir,
                &format!("{stem}_{}", e.kind.label()),
                &scaling_table(&s.fluctuation.scales, &s.fluctuation.q_values, &e.mean_log_fluctuation),
                &e.mean_spectrum.hurst,
                &e.mean_spectrum.mass,
                &e.mean_spectrum.singularity,
            )?;
        }
    }
    Ok(())
}

fn write_set(
    dir: &Path,
    stem: &str,
    scaling: &str,
    h: &HurstSpectrum,
    tau: &MassExponentCurve,
    spec: &SingularitySpectrum,
) -> Result<()> {
    write_file(&dir.join(format!("{stem}_scaling.tsv")), scaling)?;
    write_file(&dir.join(format!("{stem}_hurst.tsv")), &hurst_table(h))?;
    write_file(&dir.join(format!("{stem}_mass.tsv")), &mass_table(tau))?;
    write_file(&dir.join(format!("{stem}_spectrum.tsv")), &spectrum_table(spec))
}

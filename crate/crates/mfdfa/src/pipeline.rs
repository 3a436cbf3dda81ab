//! Run configuration and the end-to-end pipeline: ingestion, returns,
//! MFDFA of the original series, surrogate ensembles, report.

use std::path::{Path, PathBuf};

use mfdfa_core::{compute_log_returns, validate_series, FluctuationSurface, ReturnSeries, SpectrumReport, ValidationSummary};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::analysis::{analyze, PipelineParams};
use crate::error::{Error, Result};
use crate::ingest;
use crate::surrogates::{ensemble_analysis, Aggregation, SurrogateConfig, SurrogateEnsembleResult, SurrogateKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputMode {
    /// Rate table; log returns are taken.
    #[default]
    Prices,
    /// Returns used as they are.
    Returns,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub input: PathBuf,
    /// Series to analyse. In returns mode at most one, optional.
    pub columns: Vec<String>,
    pub mode: InputMode,
    #[serde(flatten)]
    pub params: PipelineParams,
    pub surrogates: Vec<SurrogateKind>,
    pub realizations: usize,
    pub aggregation: Aggregation,
    pub master_seed: u64,
    pub parallel: bool,
}

impl RunConfig {
    pub fn new(input: impl Into<PathBuf>, columns: Vec<String>) -> Self {
        Self {
            input: input.into(),
            columns,
            mode: InputMode::Prices,
            params: PipelineParams::default(),
            surrogates: vec![SurrogateKind::Shuffle, SurrogateKind::PhaseRandomize],
            realizations: 100,
            aggregation: Aggregation::MeanOfWidths,
            master_seed: 0,
            parallel: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.mode {
            InputMode::Prices if self.columns.is_empty() => {
                return Err(Error::Config("prices mode needs at least one column".into()))
            }
            InputMode::Returns if self.columns.len() > 1 => {
                return Err(Error::Config("returns mode reads a single series".into()))
            }
            _ => {}
        }
        if !self.surrogates.is_empty() && self.realizations == 0 {
            return Err(Error::Config("surrogate ensembles need at least one realization".into()));
        }
        let mut kinds = self.surrogates.clone();
        kinds.sort_by_key(|k| k.label());
        kinds.dedup();
        if kinds.len() != self.surrogates.len() {
            return Err(Error::Config("surrogate kinds listed twice".into()));
        }
        self.params.q_grid().map_err(|e| Error::analysis("q grid", e))?;
        Ok(())
    }

    fn surrogate_config(&self, kind: SurrogateKind) -> SurrogateConfig {
        SurrogateConfig {
            kind,
            realizations: self.realizations,
            master_seed: self.master_seed,
            aggregation: self.aggregation,
            parallel: self.parallel,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToolInfo {
    pub name: String,
    pub version: String,
}

impl Default for ToolInfo {
    fn default() -> Self {
        Self { name: env!("CARGO_PKG_NAME").into(), version: env!("CARGO_PKG_VERSION").into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesReport {
    pub name: String,
    /// Length of the analysed return series.
    pub points: usize,
    pub skipped_rows: usize,
    pub first_date: Option<String>,
    pub last_date: Option<String>,
    pub validation: ValidationSummary,
    pub fluctuation: FluctuationSurface,
    pub original: SpectrumReport,
    pub surrogates: Vec<SurrogateEnsembleResult>,
}

impl SeriesReport {
    pub fn surrogate(&self, kind: SurrogateKind) -> Option<&SurrogateEnsembleResult> {
        self.surrogates.iter().find(|s| s.kind == kind)
    }
}

/// One row of the width table: original, shuffled and phase-randomized.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub series: String,
    pub original: f64,
    pub shuffled: Option<f64>,
    pub phase_randomized: Option<f64>,
    pub original_delta_h: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub tool: ToolInfo,
    pub config: RunConfig,
    /// `sha256:<hex>` of the input file bytes.
    pub input_digest: String,
    pub series: Vec<SeriesReport>,
    pub summary: Vec<SummaryRow>,
}

impl AnalysisReport {
    pub fn series(&self, name: &str) -> Option<&SeriesReport> {
        self.series.iter().find(|s| s.name == name)
    }
}

struct LoadedSeries {
    name: String,
    returns: ReturnSeries,
    skipped_rows: usize,
    first_date: Option<String>,
    last_date: Option<String>,
}

fn load(cfg: &RunConfig, text: &str) -> Result<Vec<LoadedSeries>> {
    let path = cfg.input.as_path();
    match cfg.mode {
        InputMode::Prices => cfg
            .columns
            .iter()
            .map(|column| {
                let got = ingest::parse_rate_text(path, text, column)?;
                let returns = compute_log_returns(&got.prices)
                    .map_err(|e| Error::analysis(context(path, column), e))?;
                Ok(LoadedSeries {
                    name: column.clone(),
                    returns,
                    skipped_rows: got.skipped_rows,
                    first_date: got.dates.first().map(|d| d.to_string()),
                    last_date: got.dates.last().map(|d| d.to_string()),
                })
            })
            .collect(),
        InputMode::Returns => {
            let column = cfg.columns.first().map(String::as_str);
            let got = ingest::parse_returns_text(path, text, column)?;
            let name = column.map(str::to_owned).unwrap_or_else(|| {
                path.file_stem().map_or_else(|| "returns".into(), |s| s.to_string_lossy().into_owned())
            });
            Ok(vec![LoadedSeries {
                name,
                returns: got.returns,
                skipped_rows: got.skipped_rows,
                first_date: None,
                last_date: None,
            }])
        }
    }
}

fn context(path: &Path, column: &str) -> String {
    format!("{} column {column}", path.display())
}

/// Analyses one return series: original spectrum plus every configured
/// surrogate ensemble.
pub fn analyze_series(
    name: &str,
    returns: &ReturnSeries,
    cfg: &RunConfig,
) -> Result<(FluctuationSurface, SpectrumReport, Vec<SurrogateEnsembleResult>)> {
    let ctx = || context(&cfg.input, name);
    let original = analyze(returns, &cfg.params).map_err(|e| Error::analysis(ctx(), e))?;
    let surrogates = cfg
        .surrogates
        .iter()
        .map(|&kind| {
            ensemble_analysis(returns, &cfg.surrogate_config(kind), &cfg.params)
                .map_err(|e| Error::analysis(format!("{} ({} surrogates)", ctx(), kind.label()), e))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((original.fluctuation, original.spectrum, surrogates))
}

pub fn run_pipeline(cfg: &RunConfig) -> Result<AnalysisReport> {
    cfg.validate()?;
    let bytes = std::fs::read(&cfg.input).map_err(|e| Error::io(&cfg.input, e))?;
    let input_digest = format!("sha256:{}", hex::encode(Sha256::digest(&bytes)));
    let text = String::from_utf8_lossy(&bytes);

    let mut series = Vec::new();
    for loaded in load(cfg, &text)? {
        let (fluctuation, original, surrogates) = analyze_series(&loaded.name, &loaded.returns, cfg)?;
        series.push(SeriesReport {
            name: loaded.name,
            points: loaded.returns.len(),
            skipped_rows: loaded.skipped_rows,
            first_date: loaded.first_date,
            last_date: loaded.last_date,
            validation: validate_series(&loaded.returns),
            fluctuation,
            original,
            surrogates,
        });
    }
    let summary = series
        .iter()
        .map(|s| SummaryRow {
            series: s.name.clone(),
            original: s.original.measure.delta_alpha,
            shuffled: s.surrogate(SurrogateKind::Shuffle).map(|e| e.width),
            phase_randomized: s.surrogate(SurrogateKind::PhaseRandomize).map(|e| e.width),
            original_delta_h: s.original.measure.delta_h,
        })
        .collect();
    Ok(AnalysisReport { tool: ToolInfo::default(), config: cfg.clone(), input_digest, series, summary })
}

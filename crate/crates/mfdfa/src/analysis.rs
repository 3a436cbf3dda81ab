//! Runs the MFDFA chain on one return series with fixed grid settings.

use mfdfa_core::{
    build_profile, fit_hurst_spectrum, fluctuation_surface, make_scale_grid, FitRange,
    FluctuationSurface, QGrid, ReturnSeries, ScaleGrid, SpectrumReport, SurfaceOptions,
};
use serde::{Deserialize, Serialize};

/// Grid and detrending settings shared by the original series and every
/// surrogate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PipelineParams {
    pub scale_min: usize,
    pub scale_max: usize,
    pub scale_count: usize,
    pub q_min: f64,
    pub q_max: f64,
    pub q_step: f64,
    pub detrend_order: usize,
    pub fit_range: FitRange,
}

impl Default for PipelineParams {
    fn default() -> Self {
        Self {
            scale_min: 16,
            scale_max: 1024,
            scale_count: 19,
            q_min: -5.0,
            q_max: 5.0,
            q_step: 0.25,
            detrend_order: 1,
            fit_range: FitRange::ALL,
        }
    }
}

impl PipelineParams {
    pub fn scale_grid(&self, len: usize) -> mfdfa_core::Result<ScaleGrid> {
        make_scale_grid(len, self.scale_min, self.scale_max, self.scale_count)
    }

    pub fn q_grid(&self) -> mfdfa_core::Result<QGrid> {
        QGrid::uniform(self.q_min, self.q_max, self.q_step)
    }
}

/// Fluctuation surface and derived spectra of one series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesAnalysis {
    pub fluctuation: FluctuationSurface,
    pub spectrum: SpectrumReport,
}

pub fn analyze(returns: &ReturnSeries, params: &PipelineParams) -> mfdfa_core::Result<SeriesAnalysis> {
    let scales = params.scale_grid(returns.len())?;
    let qs = params.q_grid()?;
    let profile = build_profile(returns);
    let options = SurfaceOptions { order: params.detrend_order, keep_segment_variances: false };
    let fluctuation = fluctuation_surface(&profile, &scales, &qs, options)?;
    let hurst = fit_hurst_spectrum(&fluctuation, params.fit_range)?;
    let spectrum = SpectrumReport::from_hurst(hurst)?;
    Ok(SeriesAnalysis { fluctuation, spectrum })
}

//! Mass exponents, the Legendre transform to the singularity spectrum, and
//! scalar measures of multifractality strength.

use alloc::format;
use alloc::vec::Vec;

use crate::engine::HurstSpectrum;
use crate::{Error, Result};

/// `tau(q) = q h(q) - 1`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MassExponentCurve {
    pub q_values: Vec<f64>,
    pub tau: Vec<f64>,
}

impl MassExponentCurve {
    /// Second divided differences, one per interior grid point. Non-positive
    /// values mean the curve is locally concave.
    pub fn second_differences(&self) -> Vec<f64> {
        let q = &self.q_values;
        let t = &self.tau;
        (1..q.len().saturating_sub(1))
            .map(|i| {
                let d1 = (t[i] - t[i - 1]) / (q[i] - q[i - 1]);
                let d2 = (t[i + 1] - t[i]) / (q[i + 1] - q[i]);
                2.0 * (d2 - d1) / (q[i + 1] - q[i - 1])
            })
            .collect()
    }

    /// Number of interior points whose second difference exceeds `tolerance`.
    pub fn concavity_violations(&self, tolerance: f64) -> usize {
        self.second_differences().iter().filter(|&&d| d > tolerance).count()
    }
}

pub fn mass_exponents(h: &HurstSpectrum) -> MassExponentCurve {
    MassExponentCurve {
        q_values: h.q_values.clone(),
        tau: h.q_values.iter().zip(&h.h).map(|(&q, &hq)| q * hq - 1.0).collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SpectrumPoint {
    pub q: f64,
    pub alpha: f64,
    pub f_alpha: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SingularitySpectrum {
    /// One point per q grid value, in q order.
    pub points: Vec<SpectrumPoint>,
    pub alpha_min: f64,
    pub alpha_max: f64,
    /// `alpha_max - alpha_min`.
    pub width: f64,
}

impl SingularitySpectrum {
    /// Point with the largest `f(alpha)`.
    pub fn apex(&self) -> SpectrumPoint {
        *self
            .points
            .iter()
            .max_by(|a, b| a.f_alpha.total_cmp(&b.f_alpha))
            .expect("spectrum has points")
    }

    /// True when `f`, ordered by increasing `alpha` and smoothed with a
    /// 3-point median, changes direction at most once from rising to falling.
    pub fn is_single_humped(&self) -> bool {
        let mut pts = self.points.clone();
        pts.sort_by(|a, b| a.alpha.total_cmp(&b.alpha));
        let f: Vec<f64> = pts.iter().map(|p| p.f_alpha).collect();
        let smooth: Vec<f64> = (0..f.len())
            .map(|i| {
                if i == 0 || i + 1 == f.len() {
                    f[i]
                } else {
                    median3(f[i - 1], f[i], f[i + 1])
                }
            })
            .collect();
        let mut falling = false;
        for w in smooth.windows(2) {
            let d = w[1] - w[0];
            if d < 0.0 {
                falling = true;
            } else if d > 0.0 && falling {
                return false;
            }
        }
        true
    }
}

fn median3(a: f64, b: f64, c: f64) -> f64 {
    a.max(b).min(a.min(b).max(c))
}

/// Three-point finite-difference derivative on a possibly non-uniform grid.
///
/// Central at interior points, one-sided second order at the two ends, so
/// every point is exact for quadratics.
fn derivative(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let c = i.clamp(1, n - 2);
        let (x0, x1, x2) = (x[c - 1], x[c], x[c + 1]);
        let (y0, y1, y2) = (y[c - 1], y[c], y[c + 1]);
        let h1 = x1 - x0;
        let h2 = x2 - x1;
        let d = if i + 1 == c {
            -(2.0 * h1 + h2) / (h1 * (h1 + h2)) * y0 + (h1 + h2) / (h1 * h2) * y1
                - h1 / (h2 * (h1 + h2)) * y2
        } else if i == c {
            -h2 / (h1 * (h1 + h2)) * y0 + (h2 - h1) / (h1 * h2) * y1 + h1 / (h2 * (h1 + h2)) * y2
        } else {
            h2 / (h1 * (h1 + h2)) * y0 - (h1 + h2) / (h1 * h2) * y1
                + (2.0 * h2 + h1) / (h2 * (h1 + h2)) * y2
        };
        out.push(d);
    }
    out
}

/// `alpha = d tau / dq`, `f(alpha) = q alpha - tau`.
pub fn legendre_spectrum(tau: &MassExponentCurve) -> Result<SingularitySpectrum> {
    let n = tau.q_values.len();
    if n < 3 {
        return Err(Error::InvalidParams(format!("Legendre transform needs 3 q values, got {n}")));
    }
    let alpha = derivative(&tau.q_values, &tau.tau);
    let points: Vec<SpectrumPoint> = tau
        .q_values
        .iter()
        .zip(&tau.tau)
        .zip(&alpha)
        .map(|((&q, &t), &a)| SpectrumPoint { q, alpha: a, f_alpha: q * a - t })
        .collect();
    let alpha_min = alpha.iter().copied().fold(f64::INFINITY, f64::min);
    let alpha_max = alpha.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(SingularitySpectrum { points, alpha_min, alpha_max, width: alpha_max - alpha_min })
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MultifractalityMeasure {
    /// Width of the singularity spectrum.
    pub delta_alpha: f64,
    /// `h(q_min) - h(q_max)`.
    pub delta_h: f64,
    /// `max h - min h` over the whole grid; equals `delta_h` when `h` is monotone.
    pub h_range: f64,
    pub q_min: f64,
    pub q_max: f64,
    /// Set when `delta_h` came out negative, which only sampling noise can cause.
    pub negative_delta_h: bool,
}

pub fn multifractality_width(spec: &SingularitySpectrum, h: &HurstSpectrum) -> MultifractalityMeasure {
    let first = 0;
    let last = h.h.len() - 1;
    let delta_h = h.h[first] - h.h[last];
    let h_max = h.h.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let h_min = h.h.iter().copied().fold(f64::INFINITY, f64::min);
    MultifractalityMeasure {
        delta_alpha: spec.width,
        delta_h,
        h_range: h_max - h_min,
        q_min: h.q_values[first],
        q_max: h.q_values[last],
        negative_delta_h: delta_h < 0.0,
    }
}

/// The four per-series results in one serializable record.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SpectrumReport {
    pub hurst: HurstSpectrum,
    pub mass: MassExponentCurve,
    pub singularity: SingularitySpectrum,
    pub measure: MultifractalityMeasure,
}

pub fn spectrum_report(
    hurst: HurstSpectrum,
    mass: MassExponentCurve,
    singularity: SingularitySpectrum,
    measure: MultifractalityMeasure,
) -> SpectrumReport {
    SpectrumReport { hurst, mass, singularity, measure }
}

impl SpectrumReport {
    /// Runs the transform chain on a fitted Hurst spectrum.
    pub fn from_hurst(hurst: HurstSpectrum) -> Result<Self> {
        let mass = mass_exponents(&hurst);
        let singularity = legendre_spectrum(&mass)?;
        let measure = multifractality_width(&singularity, &hurst);
        Ok(spectrum_report(hurst, mass, singularity, measure))
    }
}

//! Both-ends segmentation, polynomial detrending, q-order fluctuation
//! functions and the log-log scaling fit that yields `h(q)`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::numeric::{self, CompensatedSum};
use crate::series::Profile;
use crate::{Error, Result};

/// Segment variances below this value are raised to it before taking logs
/// or negative powers.
pub const VARIANCE_FLOOR: f64 = 1e-30;

pub const MAX_DETREND_ORDER: usize = 3;

/// Strictly increasing segment lengths.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ScaleGrid {
    scales: Vec<usize>,
}

impl ScaleGrid {
    /// Validates an explicit list of scales against a series of length `len`.
    pub fn new(scales: Vec<usize>, len: usize) -> Result<Self> {
        if scales.is_empty() {
            return Err(Error::InvalidRange("empty scale grid".into()));
        }
        if scales.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidRange("scales must be strictly increasing".into()));
        }
        let min = scales[0];
        let max = *scales.last().unwrap();
        if min < 3 {
            return Err(Error::InvalidRange(format!("minimum scale {min} must be at least 3")));
        }
        if max > len / 2 {
            return Err(Error::InvalidRange(format!(
                "maximum scale {max} exceeds half the series length ({len})"
            )));
        }
        Ok(Self { scales })
    }

    pub fn scales(&self) -> &[usize] {
        &self.scales
    }

    pub fn len(&self) -> usize {
        self.scales.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scales.is_empty()
    }

    /// True when the largest scale leaves fewer than four segments per end.
    pub fn exceeds_recommended_max(&self, len: usize) -> bool {
        self.scales.last().is_some_and(|&a| a > len / 4)
    }
}

/// `count` integer scales roughly evenly spaced in `ln a`, endpoints included.
///
/// Rounding can map neighbouring points onto the same integer; duplicates are
/// dropped, so the grid may hold fewer than `count` scales.
pub fn make_scale_grid(len: usize, min_scale: usize, max_scale: usize, count: usize) -> Result<ScaleGrid> {
    if count < 4 {
        return Err(Error::InvalidRange(format!("need at least 4 scales, got {count}")));
    }
    if min_scale >= max_scale {
        return Err(Error::InvalidRange(format!(
            "minimum scale {min_scale} must be below maximum scale {max_scale}"
        )));
    }
    if max_scale > len / 2 {
        return Err(Error::InvalidRange(format!(
            "maximum scale {max_scale} exceeds half the series length ({len})"
        )));
    }
    let ratio = libm::log(max_scale as f64 / min_scale as f64);
    let mut scales: Vec<usize> = (0..count)
        .map(|i| {
            if i == 0 {
                min_scale
            } else if i == count - 1 {
                max_scale
            } else {
                let t = i as f64 / (count - 1) as f64;
                libm::round(min_scale as f64 * libm::exp(ratio * t)) as usize
            }
        })
        .collect();
    scales.dedup();
    ScaleGrid::new(scales, len)
}

/// Strictly increasing moment orders.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct QGrid {
    values: Vec<f64>,
}

impl QGrid {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidRange("empty q grid".into()));
        }
        if values.iter().any(|q| !q.is_finite()) {
            return Err(Error::InvalidRange("q values must be finite".into()));
        }
        if values.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidRange("q values must be strictly increasing".into()));
        }
        Ok(Self { values })
    }

    /// `min, min + step, ..., max`. Points within `1e-9 * step` of zero are
    /// snapped to exactly zero so that the logarithmic branch is used there.
    pub fn uniform(min: f64, max: f64, step: f64) -> Result<Self> {
        if !(step > 0.0) || !(max > min) {
            return Err(Error::InvalidRange(format!("bad q range {min}:{max}:{step}")));
        }
        let n = libm::round((max - min) / step) as usize;
        if libm::fabs(min + n as f64 * step - max) > 1e-9 * step {
            return Err(Error::InvalidRange(format!("step {step} does not divide [{min}, {max}]")));
        }
        let values = (0..=n)
            .map(|i| {
                let q = if i == n { max } else { min + i as f64 * step };
                if libm::fabs(q) < 1e-9 * step {
                    0.0
                } else {
                    q
                }
            })
            .collect();
        Self::new(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn contains_zero(&self) -> bool {
        self.values.contains(&0.0)
    }
}

/// Segment layout at one scale. Indices are 1-based and inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SegmentLayout {
    pub len: usize,
    pub scale: usize,
    /// `M_a = floor(M / a)`.
    pub num_forward: usize,
}

impl SegmentLayout {
    pub fn total_segments(&self) -> usize {
        2 * self.num_forward
    }

    /// Index range of segment `mu` in `1..=2 M_a`. Segments past `M_a` are
    /// laid out backwards from the end of the series.
    pub fn segment(&self, mu: usize) -> (usize, usize) {
        assert!(mu >= 1 && mu <= self.total_segments(), "segment {mu} out of range");
        let a = self.scale;
        if mu <= self.num_forward {
            ((mu - 1) * a + 1, mu * a)
        } else {
            let k = mu - self.num_forward;
            (self.len - k * a + 1, self.len - (k - 1) * a)
        }
    }

    /// Zero-based slice bounds of segment `mu`.
    fn slice(&self, mu: usize) -> core::ops::Range<usize> {
        let (lo, hi) = self.segment(mu);
        lo - 1..hi
    }
}

pub fn segment_bounds(len: usize, scale: usize) -> Result<SegmentLayout> {
    if scale == 0 || scale > len {
        return Err(Error::InvalidRange(format!("scale {scale} outside 1..={len}")));
    }
    Ok(SegmentLayout { len, scale, num_forward: len / scale })
}

/// Orthonormal polynomial basis of degree `order` sampled at `a` equally
/// spaced abscissae, stored row-major (`order + 1` rows of length `a`).
///
/// Built by modified Gram-Schmidt, run twice, on monomials of an abscissa
/// rescaled to `[-1, 1]`. Projecting onto this basis gives the same residual
/// as a least-squares fit against the raw index `1..=a` but stays well
/// conditioned at `a = 1024`.
#[derive(Debug, Clone)]
struct PolyBasis {
    len: usize,
    rows: Vec<f64>,
    order: usize,
}

impl PolyBasis {
    fn new(len: usize, order: usize) -> Self {
        let mut rows = vec![0.0; (order + 1) * len];
        let half = (len as f64 - 1.0) / 2.0;
        let scale = if half > 0.0 { half } else { 1.0 };
        for k in 0..=order {
            for i in 0..len {
                let t = (i as f64 - half) / scale;
                rows[k * len + i] = libm::pow(t, k as f64);
            }
            for _pass in 0..2 {
                for j in 0..k {
                    let (done, rest) = rows.split_at_mut(k * len);
                    let basis = &done[j * len..(j + 1) * len];
                    let row = &mut rest[..len];
                    let dot = compensated_dot(basis, row);
                    for (r, b) in row.iter_mut().zip(basis) {
                        *r -= dot * b;
                    }
                }
            }
            let row = &mut rows[k * len..(k + 1) * len];
            let norm = libm::sqrt(compensated_dot(row, row));
            // Distinct integer abscissae make the monomials independent.
            debug_assert!(norm > 0.0, "rank-deficient polynomial basis");
            for r in row.iter_mut() {
                *r /= norm;
            }
        }
        Self { len, rows, order }
    }

    fn row(&self, k: usize) -> &[f64] {
        &self.rows[k * self.len..(k + 1) * self.len]
    }

    /// Mean squared residual after removing the projection on the basis.
    fn residual_variance(&self, segment: &[f64], scratch: &mut Vec<f64>) -> f64 {
        debug_assert_eq!(segment.len(), self.len);
        scratch.clear();
        scratch.extend_from_slice(segment);
        for k in 0..=self.order {
            let row = self.row(k);
            let c = compensated_dot(row, scratch);
            for (r, b) in scratch.iter_mut().zip(row) {
                *r -= c * b;
            }
        }
        numeric::compensated_sum(scratch.iter().map(|r| r * r)) / self.len as f64
    }
}

fn compensated_dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = CompensatedSum::new();
    for (x, y) in a.iter().zip(b) {
        acc.add(x * y);
    }
    acc.value()
}

fn check_order(order: usize) -> Result<()> {
    if order == 0 || order > MAX_DETREND_ORDER {
        return Err(Error::InvalidParams(format!(
            "detrending order {order} outside 1..={MAX_DETREND_ORDER}"
        )));
    }
    Ok(())
}

/// Mean squared deviation of `segment` from its least-squares polynomial of
/// degree `order` over the index `1..=len`.
pub fn detrended_variance(segment: &[f64], order: usize) -> Result<f64> {
    if segment.len() < order + 2 {
        return Err(Error::InvalidRange(format!(
            "segment of length {} cannot be fitted with order {order}",
            segment.len()
        )));
    }
    let basis = PolyBasis::new(segment.len(), order);
    let mut scratch = Vec::with_capacity(segment.len());
    Ok(basis.residual_variance(segment, &mut scratch))
}

/// q-order generalized mean of segment fluctuations.
///
/// For `q != 0` this is `{ mean_mu [F^2(mu)]^(q/2) }^(1/q)`; for `q == 0`
/// it is `exp{ mean_mu ln F^2(mu) / 2 }`. Variances are floored at
/// [`VARIANCE_FLOOR`] and the sum is evaluated in log space.
pub fn fluctuation_function(variances: &[f64], q: f64) -> Result<f64> {
    if variances.is_empty() || variances.iter().all(|&v| !(v > VARIANCE_FLOOR)) {
        return Err(Error::DegenerateSeries { scale: 0 });
    }
    let logs: Vec<f64> = variances.iter().map(|&v| libm::log(v.max(VARIANCE_FLOOR))).collect();
    Ok(libm::exp(log_fluctuation(&logs, q)))
}

/// `ln F_q` from log variances.
fn log_fluctuation(log_variances: &[f64], q: f64) -> f64 {
    let n = log_variances.len() as f64;
    if q == 0.0 {
        return 0.5 * numeric::compensated_sum(log_variances.iter().copied()) / n;
    }
    let half_q = 0.5 * q;
    let peak = log_variances
        .iter()
        .map(|&l| half_q * l)
        .fold(f64::NEG_INFINITY, f64::max);
    let sum = numeric::compensated_sum(log_variances.iter().map(|&l| libm::exp(half_q * l - peak)));
    (peak + libm::log(sum / n)) / q
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SurfaceOptions {
    pub order: usize,
    /// Keep every segment variance in the returned surface.
    pub keep_segment_variances: bool,
}

impl Default for SurfaceOptions {
    fn default() -> Self {
        Self { order: 1, keep_segment_variances: false }
    }
}

/// `F_q(a)` over the (q, scale) grid.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FluctuationSurface {
    pub q_values: Vec<f64>,
    pub scales: Vec<usize>,
    /// `values[iq][ia]` is `F_q(a)` for `q_values[iq]` and `scales[ia]`.
    pub values: Vec<Vec<f64>>,
    pub detrend_order: usize,
    /// Segments whose variance was raised to [`VARIANCE_FLOOR`].
    pub floored_segments: usize,
    /// Cells where `F_q(a)` decreased with increasing `q` by more than
    /// rounding noise. Always zero for a correct estimator.
    pub monotonicity_violations: usize,
    #[cfg_attr(feature = "serde", serde(default, skip_serializing_if = "Option::is_none"))]
    pub segment_variances: Option<Vec<Vec<f64>>>,
}

impl FluctuationSurface {
    /// Row of `F_q(a)` across scales for the `iq`-th moment.
    pub fn row(&self, iq: usize) -> &[f64] {
        &self.values[iq]
    }

    pub fn log_row(&self, iq: usize) -> Vec<f64> {
        self.values[iq].iter().map(|&f| libm::log(f)).collect()
    }
}

/// Segment variances at one scale in segment order `mu = 1..=2 M_a`.
pub fn segment_variances(profile: &[f64], scale: usize, order: usize) -> Result<Vec<f64>> {
    check_order(order)?;
    if scale < order + 2 {
        return Err(Error::InvalidRange(format!("scale {scale} too small for order {order}")));
    }
    let layout = segment_bounds(profile.len(), scale)?;
    let basis = PolyBasis::new(scale, order);
    let mut scratch = Vec::with_capacity(scale);
    Ok((1..=layout.total_segments())
        .map(|mu| basis.residual_variance(&profile[layout.slice(mu)], &mut scratch))
        .collect())
}

pub fn fluctuation_surface(
    profile: &Profile,
    scales: &ScaleGrid,
    qs: &QGrid,
    options: SurfaceOptions,
) -> Result<FluctuationSurface> {
    check_order(options.order)?;
    let len = profile.len();
    let (min, max) = (scales.scales()[0], *scales.scales().last().unwrap());
    if min < options.order + 2 {
        return Err(Error::InvalidRange(format!(
            "minimum scale {min} too small for detrending order {}",
            options.order
        )));
    }
    if max > len / 2 {
        return Err(Error::InvalidRange(format!(
            "maximum scale {max} exceeds half the series length ({len})"
        )));
    }

    let mut values = vec![Vec::with_capacity(scales.len()); qs.len()];
    let mut floored_segments = 0;
    let mut kept = options.keep_segment_variances.then(Vec::new);
    for &scale in scales.scales() {
        let variances = segment_variances(profile.values(), scale, options.order)?;
        if variances.iter().all(|&v| !(v > VARIANCE_FLOOR)) {
            return Err(Error::DegenerateSeries { scale });
        }
        let logs: Vec<f64> = variances
            .iter()
            .map(|&v| {
                if v < VARIANCE_FLOOR {
                    floored_segments += 1;
                }
                libm::log(v.max(VARIANCE_FLOOR))
            })
            .collect();
        for (row, &q) in values.iter_mut().zip(qs.values()) {
            row.push(libm::exp(log_fluctuation(&logs, q)));
        }
        if let Some(k) = kept.as_mut() {
            k.push(variances);
        }
    }

    let mut monotonicity_violations = 0;
    for ia in 0..scales.len() {
        for iq in 1..qs.len() {
            let (lo, hi) = (values[iq - 1][ia], values[iq][ia]);
            if hi < lo * (1.0 - 1e-12) {
                monotonicity_violations += 1;
            }
        }
    }

    Ok(FluctuationSurface {
        q_values: qs.values().to_vec(),
        scales: scales.scales().to_vec(),
        values,
        detrend_order: options.order,
        floored_segments,
        monotonicity_violations,
        segment_variances: kept,
    })
}

/// Inclusive range of scales used in the log-log regression.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FitRange {
    pub min_scale: usize,
    pub max_scale: usize,
}

impl FitRange {
    pub const ALL: FitRange = FitRange { min_scale: 0, max_scale: usize::MAX };

    fn contains(&self, a: usize) -> bool {
        a >= self.min_scale && a <= self.max_scale
    }
}

impl Default for FitRange {
    fn default() -> Self {
        Self::ALL
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RegressionDiagnostics {
    pub intercept: f64,
    pub slope_stderr: f64,
    pub r_squared: f64,
}

/// Generalized Hurst exponents `h(q)`, the slopes of `ln F_q(a)` against `ln a`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HurstSpectrum {
    pub q_values: Vec<f64>,
    pub h: Vec<f64>,
    pub diagnostics: Vec<RegressionDiagnostics>,
    /// Scales that entered the regression.
    pub scales_used: Vec<usize>,
}

impl HurstSpectrum {
    /// Builds a spectrum from known exponents, with empty diagnostics.
    pub fn from_values(q_values: Vec<f64>, h: Vec<f64>) -> Self {
        let diagnostics = vec![
            RegressionDiagnostics { intercept: 0.0, slope_stderr: 0.0, r_squared: 1.0 };
            h.len()
        ];
        Self { q_values, h, diagnostics, scales_used: Vec::new() }
    }

    pub fn at(&self, q: f64) -> Option<f64> {
        self.q_values.iter().position(|&x| x == q).map(|i| self.h[i])
    }

    /// Adjacent pairs where `h` rises with `q` by more than twice the larger
    /// slope standard error.
    pub fn monotonicity_violations(&self) -> usize {
        (1..self.h.len())
            .filter(|&i| {
                let allowance = 2.0 * self.diagnostics[i - 1].slope_stderr.max(self.diagnostics[i].slope_stderr);
                self.h[i] - self.h[i - 1] > allowance
            })
            .count()
    }
}

pub fn fit_hurst_spectrum(surface: &FluctuationSurface, range: FitRange) -> Result<HurstSpectrum> {
    let picked: Vec<usize> = (0..surface.scales.len())
        .filter(|&i| range.contains(surface.scales[i]))
        .collect();
    if picked.len() < 4 {
        return Err(Error::InvalidRange(format!(
            "need at least 4 scales in the fitting range, got {}",
            picked.len()
        )));
    }
    let log_a: Vec<f64> = picked.iter().map(|&i| libm::log(surface.scales[i] as f64)).collect();
    let mut h = Vec::with_capacity(surface.q_values.len());
    let mut diagnostics = Vec::with_capacity(surface.q_values.len());
    for row in &surface.values {
        let log_f: Vec<f64> = picked.iter().map(|&i| libm::log(row[i])).collect();
        let fit = numeric::fit_line(&log_a, &log_f);
        if !fit.slope.is_finite() {
            return Err(Error::DegenerateSeries { scale: surface.scales[picked[0]] });
        }
        h.push(fit.slope);
        diagnostics.push(RegressionDiagnostics {
            intercept: fit.intercept,
            slope_stderr: fit.slope_stderr,
            r_squared: fit.r_squared,
        });
    }
    Ok(HurstSpectrum {
        q_values: surface.q_values.clone(),
        h,
        diagnostics,
        scales_used: picked.iter().map(|&i| surface.scales[i]).collect(),
    })
}

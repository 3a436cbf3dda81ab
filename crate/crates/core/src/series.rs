//! Price series, log returns and cumulative profiles.

use alloc::vec::Vec;

use crate::numeric::{self, CompensatedSum};
use crate::{Error, Result};

/// Fraction of exact zeros at or above which a return series is flagged.
pub const ZERO_FRACTION_WARNING: f64 = 0.10;

/// Strictly positive prices ordered by date.
///
/// Dates, when present, are opaque ordinal keys (the ingestion layer uses
/// days since the common era) and must be strictly increasing.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PriceSeries {
    values: Vec<f64>,
    dates: Option<Vec<i64>>,
}

impl PriceSeries {
    pub const MIN_LEN: usize = 3;

    pub fn new(values: Vec<f64>) -> Result<Self> {
        Self::build(values, None)
    }

    pub fn with_dates(values: Vec<f64>, dates: Vec<i64>) -> Result<Self> {
        Self::build(values, Some(dates))
    }

    fn build(values: Vec<f64>, dates: Option<Vec<i64>>) -> Result<Self> {
        if values.len() < Self::MIN_LEN {
            return Err(Error::TooShort { len: values.len(), min: Self::MIN_LEN });
        }
        for (index, &value) in values.iter().enumerate() {
            // `!(v > 0)` also rejects NaN.
            if !(value > 0.0) || !value.is_finite() {
                return Err(Error::NonPositivePrice { index, value });
            }
        }
        if let Some(d) = &dates {
            if d.len() != values.len() {
                return Err(Error::LabelMismatch { labels: d.len(), prices: values.len() });
            }
            if let Some(pos) = d.windows(2).position(|w| w[1] <= w[0]) {
                return Err(Error::NonMonotoneDates { index: pos + 1 });
            }
        }
        Ok(Self { values, dates })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn dates(&self) -> Option<&[i64]> {
        self.dates.as_deref()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// A sequence of (log) returns with its cached mean.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ReturnSeries {
    values: Vec<f64>,
    mean: f64,
}

impl ReturnSeries {
    /// Wraps raw returns. Values must be finite and there must be at least one.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::TooShort { len: 0, min: 1 });
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        let mean = numeric::mean(&values);
        Ok(Self { values, mean })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Same values in reverse time order.
    pub fn reversed(&self) -> Self {
        let mut values = self.values.clone();
        values.reverse();
        Self { values, mean: self.mean }
    }
}

/// Cumulative sum of mean-centred returns, `Y(1..=M)`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Profile {
    values: Vec<f64>,
}

impl Profile {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// `ln p[k+1] - ln p[k]` for consecutive prices.
pub fn compute_log_returns(prices: &PriceSeries) -> Result<ReturnSeries> {
    let values = prices
        .values()
        .windows(2)
        .map(|w| libm::log(w[1]) - libm::log(w[0]))
        .collect();
    ReturnSeries::new(values)
}

pub fn build_profile(returns: &ReturnSeries) -> Profile {
    let mean = returns.mean();
    let mut acc = CompensatedSum::new();
    let values = returns
        .values()
        .iter()
        .map(|&x| {
            acc.add(x - mean);
            acc.value()
        })
        .collect();
    Profile { values }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ValidationSummary {
    pub length: usize,
    pub zero_count: usize,
    pub zero_fraction: f64,
    pub mean: f64,
    pub variance: f64,
    /// Set when the zero fraction reaches [`ZERO_FRACTION_WARNING`].
    pub zero_warning: bool,
}

pub fn validate_series(returns: &ReturnSeries) -> ValidationSummary {
    let length = returns.len();
    let zero_count = returns.values().iter().filter(|&&v| v == 0.0).count();
    let zero_fraction = zero_count as f64 / length as f64;
    ValidationSummary {
        length,
        zero_count,
        zero_fraction,
        mean: returns.mean(),
        variance: numeric::variance(returns.values()),
        zero_warning: zero_fraction >= ZERO_FRACTION_WARNING,
    }
}

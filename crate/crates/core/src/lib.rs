//! Multifractal detrended fluctuation analysis (MFDFA) without `std`.
//!
//! The pipeline runs from prices to multifractality strength:
//!
//! ```text
//! PriceSeries -> ReturnSeries -> Profile -> FluctuationSurface
//!             -> HurstSpectrum -> MassExponentCurve -> SingularitySpectrum
//! ```
//!
//! [`series`] builds returns and cumulative profiles, [`engine`] segments the
//! profile from both ends, detrends each segment and fits `h(q)`, [`spectrum`]
//! applies the Legendre transform, and [`synth`] generates series with known
//! fractal properties for validating the estimator.
//!
//! The crate only needs `alloc`. IO, surrogate ensembles and the command line
//! live in the `mfdfa` crate.
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

mod error;
pub mod numeric;
pub mod engine;
pub mod series;
pub mod spectrum;
pub mod synth;

pub use engine::{
    detrended_variance, fit_hurst_spectrum, fluctuation_function, fluctuation_surface,
    make_scale_grid, segment_bounds, FitRange, FluctuationSurface, HurstSpectrum, QGrid,
    RegressionDiagnostics, ScaleGrid, SegmentLayout, SurfaceOptions, VARIANCE_FLOOR,
};
pub use error::{Error, Result};
pub use series::{build_profile, compute_log_returns, validate_series, PriceSeries, Profile, ReturnSeries, ValidationSummary};
pub use spectrum::{
    legendre_spectrum, mass_exponents, multifractality_width, spectrum_report, MassExponentCurve,
    MultifractalityMeasure, SingularitySpectrum, SpectrumPoint, SpectrumReport,
};
pub use synth::{analytic_cascade_hurst, binomial_cascade, student_t, white_noise, CascadeParams};

//! Shuffled and phase-randomized surrogates, and ensembles of MFDFA runs
//! over them.
//!
//! Shuffling keeps the value distribution and destroys temporal ordering.
//! Phase randomization keeps the power spectrum (so the linear
//! autocorrelation) and replaces the marginal distribution by an
//! approximately Gaussian one, which removes the contribution of fat tails.

use std::f64::consts::TAU;

use mfdfa_core::{HurstSpectrum, ReturnSeries, SpectrumReport};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::analysis::{analyze, PipelineParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SurrogateKind {
    Shuffle,
    PhaseRandomize,
}

impl SurrogateKind {
    pub fn label(self) -> &'static str {
        match self {
            SurrogateKind::Shuffle => "shuffled",
            SurrogateKind::PhaseRandomize => "phase_randomized",
        }
    }

    pub fn generate(self, returns: &ReturnSeries, seed: u64) -> ReturnSeries {
        match self {
            SurrogateKind::Shuffle => shuffle_surrogate(returns, seed),
            SurrogateKind::PhaseRandomize => phase_randomized_surrogate(returns, seed),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Aggregation {
    /// Average of the per-realization widths.
    #[default]
    MeanOfWidths,
    /// Width of the spectrum built from the pointwise mean `h(q)`.
    WidthOfMeanSpectrum,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurrogateConfig {
    pub kind: SurrogateKind,
    pub realizations: usize,
    pub master_seed: u64,
    pub aggregation: Aggregation,
    /// Run realizations on the rayon pool. Output does not depend on it.
    pub parallel: bool,
}

impl SurrogateConfig {
    pub fn new(kind: SurrogateKind, realizations: usize, master_seed: u64) -> Self {
        Self { kind, realizations, master_seed, aggregation: Aggregation::default(), parallel: true }
    }
}

/// Seed of realization `index`, derived from the master seed alone so that
/// realizations can run in any order.
pub fn realization_seed(master_seed: u64, index: usize) -> u64 {
    // SplitMix64 output function applied to a counter offset.
    let mut z = master_seed.wrapping_add((index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Uniformly random permutation of the returns (Fisher-Yates).
pub fn shuffle_surrogate(returns: &ReturnSeries, seed: u64) -> ReturnSeries {
    let mut values = returns.values().to_vec();
    values.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    ReturnSeries::new(values).expect("permutation of a valid series")
}

/// Random-phase surrogate with the same amplitude spectrum.
///
/// Bins `1..ceil(M/2)` get independent phases uniform on `[0, 2pi)` and bins
/// `M - k` their conjugates, so the inverse transform is real. DC and, for
/// even `M`, Nyquist bins keep their (real) values.
pub fn phase_randomized_surrogate(returns: &ReturnSeries, seed: u64) -> ReturnSeries {
    let n = returns.len();
    let mut spectrum: Vec<Complex<f64>> = returns.values().iter().map(|&x| Complex::new(x, 0.0)).collect();
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(n).process(&mut spectrum);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    spectrum[0].im = 0.0;
    for k in 1..n.div_ceil(2) {
        let phase = Complex::from_polar(1.0, rng.random::<f64>() * TAU);
        spectrum[k] *= phase;
        spectrum[n - k] = spectrum[k].conj();
    }
    if n % 2 == 0 && n > 0 {
        // Real for real input; drop rounding residue in the imaginary part.
        spectrum[n / 2].im = 0.0;
    }

    planner.plan_fft_inverse(n).process(&mut spectrum);
    let scale = 1.0 / n as f64;
    ReturnSeries::new(spectrum.iter().map(|c| c.re * scale).collect()).expect("finite inverse transform")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurrogateEnsembleResult {
    pub kind: SurrogateKind,
    pub aggregation: Aggregation,
    pub realizations: usize,
    pub seeds_used: Vec<u64>,
    /// Widths of the realizations that completed, in realization order.
    pub per_realization_widths: Vec<f64>,
    pub per_realization_delta_h: Vec<f64>,
    /// Realization indices skipped because the surrogate was degenerate.
    pub skipped: Vec<usize>,
    pub mean_width: f64,
    /// Sample standard deviation of the widths (zero for a single realization).
    pub std_width: f64,
    /// Spectra built from the pointwise mean `h(q)` across realizations.
    pub mean_spectrum: SpectrumReport,
    /// Pointwise mean of `ln F_q(a)`, rows by q and columns by scale.
    pub mean_log_fluctuation: Vec<Vec<f64>>,
    /// The width this ensemble reports under its aggregation rule.
    pub width: f64,
}

struct Realization {
    width: f64,
    delta_h: f64,
    h: Vec<f64>,
    log_f: Vec<Vec<f64>>,
}

pub fn ensemble_analysis(
    returns: &ReturnSeries,
    cfg: &SurrogateConfig,
    params: &PipelineParams,
) -> mfdfa_core::Result<SurrogateEnsembleResult> {
    if cfg.realizations == 0 {
        return Err(mfdfa_core::Error::InvalidParams("ensemble needs at least one realization".into()));
    }
    let seeds: Vec<u64> = (0..cfg.realizations).map(|r| realization_seed(cfg.master_seed, r)).collect();
    let run = |&seed: &u64| -> mfdfa_core::Result<Option<Realization>> {
        let surrogate = cfg.kind.generate(returns, seed);
        match analyze(&surrogate, params) {
            Ok(a) => Ok(Some(Realization {
                width: a.spectrum.measure.delta_alpha,
                delta_h: a.spectrum.measure.delta_h,
                h: a.spectrum.hurst.h,
                log_f: (0..a.fluctuation.q_values.len()).map(|iq| a.fluctuation.log_row(iq)).collect(),
            })),
            Err(mfdfa_core::Error::DegenerateSeries { .. }) => Ok(None),
            Err(e) => Err(e),
        }
    };
    let outcomes: Vec<_> = if cfg.parallel {
        seeds.par_iter().map(run).collect::<mfdfa_core::Result<_>>()?
    } else {
        seeds.iter().map(run).collect::<mfdfa_core::Result<_>>()?
    };

    let mut skipped = Vec::new();
    let mut done = Vec::with_capacity(outcomes.len());
    for (i, o) in outcomes.into_iter().enumerate() {
        match o {
            Some(r) => done.push(r),
            None => skipped.push(i),
        }
    }
    if done.is_empty() {
        return Err(mfdfa_core::Error::DegenerateSeries { scale: params.scale_min });
    }

    // Reductions run sequentially in realization order.
    let n = done.len() as f64;
    let widths: Vec<f64> = done.iter().map(|r| r.width).collect();
    let mean_width = widths.iter().sum::<f64>() / n;
    let std_width = if done.len() > 1 {
        (widths.iter().map(|w| (w - mean_width).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    let q_values = params.q_grid()?.values().to_vec();
    let mean_h: Vec<f64> = (0..q_values.len())
        .map(|iq| done.iter().map(|r| r.h[iq]).sum::<f64>() / n)
        .collect();
    let mean_log_fluctuation: Vec<Vec<f64>> = (0..q_values.len())
        .map(|iq| {
            (0..done[0].log_f[iq].len())
                .map(|ia| done.iter().map(|r| r.log_f[iq][ia]).sum::<f64>() / n)
                .collect()
        })
        .collect();
    let mut mean_hurst = HurstSpectrum::from_values(q_values, mean_h);
    mean_hurst.scales_used = params.scale_grid(returns.len())?.scales().to_vec();
    let mean_spectrum = SpectrumReport::from_hurst(mean_hurst)?;
    let width = match cfg.aggregation {
        Aggregation::MeanOfWidths => mean_width,
        Aggregation::WidthOfMeanSpectrum => mean_spectrum.measure.delta_alpha,
    };

    Ok(SurrogateEnsembleResult {
        kind: cfg.kind,
        aggregation: cfg.aggregation,
        realizations: cfg.realizations,
        seeds_used: seeds,
        per_realization_delta_h: done.iter().map(|r| r.delta_h).collect(),
        per_realization_widths: widths,
        skipped,
        mean_width,
        std_width,
        mean_spectrum,
        mean_log_fluctuation,
        width,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use mfdfa_core::white_noise;
    use proptest::prelude::*;

    fn dft_magnitudes(x: &[f64]) -> Vec<f64> {
        let mut buf: Vec<Complex<f64>> = x.iter().map(|&v| Complex::new(v, 0.0)).collect();
        FftPlanner::new().plan_fft_forward(x.len()).process(&mut buf);
        buf.iter().map(|c| c.norm()).collect()
    }

    #[test]
    fn shuffle_keeps_multiset() {
        let r = white_noise(4726, 1).unwrap();
        for seed in [0, 1, 99] {
            let s = shuffle_surrogate(&r, seed);
            let mut a = r.values().to_vec();
            let mut b = s.values().to_vec();
            a.sort_by(f64::total_cmp);
            b.sort_by(f64::total_cmp);
            assert_eq!(a, b);
            assert_ne!(s.values(), r.values());
        }
    }

    #[test]
    fn shuffle_of_single_value() {
        let r = ReturnSeries::new(vec![0.25]).unwrap();
        assert_eq!(shuffle_surrogate(&r, 7).values(), &[0.25]);
    }

    #[test]
    fn shuffle_is_seeded() {
        let r = white_noise(4726, 2).unwrap();
        for pair in 0..10u64 {
            let (s1, s2) = (2 * pair, 2 * pair + 1);
            assert_eq!(shuffle_surrogate(&r, s1), shuffle_surrogate(&r, s1));
            assert_ne!(shuffle_surrogate(&r, s1).values(), shuffle_surrogate(&r, s2).values());
        }
    }

    #[test]
    fn phase_surrogate_keeps_amplitudes_and_mean() {
        for (len, seed) in [(4726, 3), (1024, 4), (1023, 5), (4, 6), (5, 7)] {
            let r = white_noise(len.max(64), seed).unwrap();
            let r = ReturnSeries::new(r.values()[..len].to_vec()).unwrap();
            let s = phase_randomized_surrogate(&r, seed);
            assert_eq!(s.len(), len);
            let (a, b) = (dft_magnitudes(r.values()), dft_magnitudes(s.values()));
            for (x, y) in a.iter().zip(&b) {
                assert!((x - y).abs() <= 1e-10 * x.max(1e-300), "len {len}: {x} vs {y}");
            }
            assert!((r.mean() - s.mean()).abs() < 1e-10);
        }
    }

    #[test]
    fn phase_surrogate_of_constant_is_constant() {
        let r = ReturnSeries::new(vec![0.37; 100]).unwrap();
        let s = phase_randomized_surrogate(&r, 11);
        for v in s.values() {
            assert!((v - 0.37).abs() < 1e-12);
        }
    }

    #[test]
    fn phase_surrogate_keeps_circular_autocovariance() {
        let r = white_noise(1024, 8).unwrap();
        let s = phase_randomized_surrogate(&r, 8);
        let acov = |x: &[f64], lag: usize| {
            let m = x.iter().sum::<f64>() / x.len() as f64;
            (0..x.len()).map(|i| (x[i] - m) * (x[(i + lag) % x.len()] - m)).sum::<f64>() / x.len() as f64
        };
        for lag in 0..=20 {
            let (a, b) = (acov(r.values(), lag), acov(s.values(), lag));
            assert!((a - b).abs() < 1e-8, "lag {lag}: {a} vs {b}");
        }
        // but the values themselves are different
        assert!(r.values().iter().zip(s.values()).any(|(a, b)| (a - b).abs() > 1e-3));
    }

    #[test]
    fn seeds_are_distinct_and_stable() {
        let seeds: Vec<u64> = (0..1000).map(|i| realization_seed(42, i)).collect();
        let mut sorted = seeds.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), 1000);
        assert_eq!(realization_seed(42, 0), realization_seed(42, 0));
        assert_ne!(realization_seed(42, 0), realization_seed(43, 0));
    }

    #[test]
    fn single_realization_equals_direct_run() {
        let r = white_noise(2048, 5).unwrap();
        let params = PipelineParams { scale_max: 512, ..PipelineParams::default() };
        for kind in [SurrogateKind::Shuffle, SurrogateKind::PhaseRandomize] {
            let cfg = SurrogateConfig::new(kind, 1, 17);
            let ens = ensemble_analysis(&r, &cfg, &params).unwrap();
            let direct = analyze(&kind.generate(&r, realization_seed(17, 0)), &params).unwrap();
            assert_eq!(ens.per_realization_widths, vec![direct.spectrum.measure.delta_alpha]);
            assert_eq!(ens.mean_spectrum.hurst.h, direct.spectrum.hurst.h);
            assert_eq!(ens.std_width, 0.0);
            assert_eq!(ens.width, ens.mean_width);
        }
    }

    #[test]
    fn parallel_and_serial_agree_bitwise() {
        let r = white_noise(2048, 6).unwrap();
        let params = PipelineParams { scale_max: 512, ..PipelineParams::default() };
        let mut cfg = SurrogateConfig::new(SurrogateKind::PhaseRandomize, 12, 3);
        let par = ensemble_analysis(&r, &cfg, &params).unwrap();
        cfg.parallel = false;
        let ser = ensemble_analysis(&r, &cfg, &params).unwrap();
        assert_eq!(par, ser);
    }

    #[test]
    fn width_of_mean_spectrum_aggregation() {
        let r = white_noise(2048, 7).unwrap();
        let params = PipelineParams { scale_max: 512, ..PipelineParams::default() };
        let mut cfg = SurrogateConfig::new(SurrogateKind::Shuffle, 6, 1);
        cfg.aggregation = Aggregation::WidthOfMeanSpectrum;
        let ens = ensemble_analysis(&r, &cfg, &params).unwrap();
        assert_eq!(ens.width, ens.mean_spectrum.measure.delta_alpha);
        assert_eq!(ens.per_realization_widths.len(), 6);
        assert!(ens.std_width > 0.0);
    }

    #[test]
    fn constant_series_is_skipped_not_dropped() {
        let r = ReturnSeries::new(vec![0.01; 512]).unwrap();
        let params = PipelineParams { scale_max: 128, ..PipelineParams::default() };
        let cfg = SurrogateConfig::new(SurrogateKind::Shuffle, 3, 1);
        let err = ensemble_analysis(&r, &cfg, &params).unwrap_err();
        assert!(matches!(err, mfdfa_core::Error::DegenerateSeries { .. }));
    }

    #[test]
    fn iid_noise_shuffled_width_matches_original() {
        let params = PipelineParams::default();
        let r = white_noise(4726, 12).unwrap();
        let orig = analyze(&r, &params).unwrap().spectrum.measure.delta_alpha;
        let ens = ensemble_analysis(&r, &SurrogateConfig::new(SurrogateKind::Shuffle, 20, 9), &params).unwrap();
        assert!((ens.mean_width - orig).abs() < 2.0 * ens.std_width, "{orig} vs {} ± {}", ens.mean_width, ens.std_width);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn phase_surrogate_preserves_variance(
            v in proptest::collection::vec(-1.0f64..1.0, 8..400),
            seed in any::<u64>(),
        ) {
            let r = ReturnSeries::new(v).unwrap();
            let s = phase_randomized_surrogate(&r, seed);
            let var = |x: &ReturnSeries| {
                x.values().iter().map(|y| (y - x.mean()).powi(2)).sum::<f64>() / x.len() as f64
            };
            prop_assert!((var(&r) - var(&s)).abs() <= 1e-10 * var(&r));
        }

        #[test]
        fn shuffle_is_a_permutation(v in proptest::collection::vec(-1.0f64..1.0, 1..400), seed in any::<u64>()) {
            let r = ReturnSeries::new(v.clone()).unwrap();
            let mut out = shuffle_surrogate(&r, seed).into_values();
            let mut inp = v;
            out.sort_by(f64::total_cmp);
            inp.sort_by(f64::total_cmp);
            prop_assert_eq!(out, inp);
        }
    }
}

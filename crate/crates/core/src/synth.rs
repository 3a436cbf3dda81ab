//! Synthetic series with known fractal properties.

use alloc::format;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{StandardNormal, StudentT};

use crate::series::ReturnSeries;
use crate::{Error, Result};

pub const MIN_NOISE_LEN: usize = 64;

/// iid standard Gaussian draws.
pub fn white_noise(length: usize, seed: u64) -> Result<ReturnSeries> {
    check_len(length)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ReturnSeries::new((0..length).map(|_| rng.sample::<f64, _>(StandardNormal)).collect())
}

/// iid Student-t draws: fat tails, no temporal correlation.
pub fn student_t(length: usize, dof: f64, seed: u64) -> Result<ReturnSeries> {
    check_len(length)?;
    let dist = StudentT::new(dof).map_err(|e| Error::InvalidParams(format!("Student-t dof {dof}: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ReturnSeries::new((0..length).map(|_| rng.sample(dist)).collect())
}

fn check_len(length: usize) -> Result<()> {
    if length < MIN_NOISE_LEN {
        return Err(Error::TooShort { len: length, min: MIN_NOISE_LEN });
    }
    Ok(())
}

/// Deterministic binomial multifractal cascade of length `2^levels`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CascadeParams {
    pub levels: u32,
    /// Multiplier `a0` in `(0.5, 1)`.
    pub weight: f64,
}

impl CascadeParams {
    pub const MIN_LEVELS: u32 = 8;
    pub const MAX_LEVELS: u32 = 24;

    pub fn new(levels: u32, weight: f64) -> Result<Self> {
        let p = Self { levels, weight };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(Self::MIN_LEVELS..=Self::MAX_LEVELS).contains(&self.levels) {
            return Err(Error::InvalidParams(format!(
                "cascade levels {} outside {}..={}",
                self.levels,
                Self::MIN_LEVELS,
                Self::MAX_LEVELS
            )));
        }
        if !(self.weight > 0.5 && self.weight < 1.0) {
            return Err(Error::InvalidParams(format!("cascade weight {} outside (0.5, 1)", self.weight)));
        }
        Ok(())
    }
}

/// `x_i = a0^n(i-1) (1 - a0)^(k - n(i-1))` where `n(j)` counts the 1-bits of `j`.
pub fn binomial_cascade(params: CascadeParams) -> Result<ReturnSeries> {
    params.validate()?;
    ReturnSeries::new(cascade_values(params.levels, params.weight))
}

/// Cascade values without parameter validation; used for tiny hand-checked cases.
pub fn cascade_values(levels: u32, weight: f64) -> Vec<f64> {
    let len = 1usize << levels;
    let low = 1.0 - weight;
    // Precompute powers so each value costs two lookups.
    let hi_pow: Vec<f64> = (0..=levels).map(|n| libm::pow(weight, n as f64)).collect();
    let lo_pow: Vec<f64> = (0..=levels).map(|n| libm::pow(low, n as f64)).collect();
    (0..len)
        .map(|j| {
            let n = (j as u64).count_ones();
            hi_pow[n as usize] * lo_pow[(levels - n) as usize]
        })
        .collect()
}

/// Exact `h(q)` of the binomial cascade:
/// `1/q - ln(a0^q + (1 - a0)^q) / (q ln 2)`, with its limit at `q = 0`.
pub fn analytic_cascade_hurst(params: CascadeParams, q: f64) -> f64 {
    let a = params.weight;
    let b = 1.0 - a;
    if q == 0.0 {
        return -(libm::log2(a) + libm::log2(b)) / 2.0;
    }
    1.0 / q - libm::log(libm::pow(a, q) + libm::pow(b, q)) / (q * core::f64::consts::LN_2)
}

#[cfg(test)]
mod tests {
    use super::*;


    #[test]
    fn tiny_cascade_by_hand() {
        let v = cascade_values(2, 0.6);
        let expect = [0.16, 0.24, 0.24, 0.36];
        for (a, b) in v.iter().zip(expect) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn cascade_sums_to_one() {
        for (k, a) in [(8, 0.55), (13, 0.6), (16, 0.9)] {
            let s = binomial_cascade(CascadeParams::new(k, a).unwrap()).unwrap();
            let sum = crate::numeric::compensated_sum(s.values().iter().copied());
            assert!((sum - 1.0).abs() < 1e-12, "k={k} a={a} sum={sum}");
        }
    }

    #[test]
    fn cascade_param_bounds() {
        assert!(CascadeParams::new(7, 0.6).is_err());
        assert!(CascadeParams::new(25, 0.6).is_err());
        assert!(CascadeParams::new(10, 0.5).is_err());
        assert!(CascadeParams::new(10, 1.0).is_err());
    }

    #[test]
    fn analytic_hurst_special_cases() {
        let p = CascadeParams { levels: 10, weight: 0.6 };
        assert!((analytic_cascade_hurst(p, 1.0) - 1.0).abs() < 1e-15);
        let expect = 0.5 - libm::log(0.52) / (2.0 * core::f64::consts::LN_2);
        assert!((analytic_cascade_hurst(p, 2.0) - expect).abs() < 1e-15);
        assert!((expect - 0.9717).abs() < 1e-4);
        // symmetric weights collapse to a monofractal
        let flat = CascadeParams { levels: 10, weight: 0.5 };
        for q in [-5.0, -1.0, 0.0, 0.5, 3.0] {
            assert!((analytic_cascade_hurst(flat, q) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn analytic_hurst_is_continuous_at_zero() {
        let p = CascadeParams { levels: 10, weight: 0.6 };
        let h0 = analytic_cascade_hurst(p, 0.0);
        for eps in [1e-4, -1e-4] {
            assert!((analytic_cascade_hurst(p, eps) - h0).abs() < 1e-4);
        }
    }

    #[test]
    fn analytic_hurst_non_increasing() {
        for a in [0.55, 0.6, 0.75, 0.9] {
            let p = CascadeParams { levels: 10, weight: a };
            let hs: Vec<f64> = (-40..=40).map(|i| analytic_cascade_hurst(p, i as f64 * 0.125)).collect();
            assert!(hs.windows(2).all(|w| w[1] <= w[0] + 1e-12), "a={a}");
        }
    }

    #[test]
    fn noise_is_seeded() {
        let a = white_noise(256, 3).unwrap();
        assert_eq!(a, white_noise(256, 3).unwrap());
        assert_ne!(a, white_noise(256, 4).unwrap());
        assert!(white_noise(63, 1).is_err());
    }

    #[test]
    fn noise_mean_within_clt_bound() {
        for seed in 0..10 {
            let n = 4096;
            let s = white_noise(n, seed).unwrap();
            assert!(s.mean().abs() < 4.0 / libm::sqrt(n as f64));
        }
    }

    #[test]
    fn student_t_has_fat_tails() {
        let s = student_t(1 << 14, 3.0, 5).unwrap();
        let v = s.values();
        let m = s.mean();
        let m2 = v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / v.len() as f64;
        let m4 = v.iter().map(|x| (x - m).powi(4)).sum::<f64>() / v.len() as f64;
        assert!(m4 / (m2 * m2) - 3.0 > 2.0);
    }
}

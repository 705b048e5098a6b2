use std::f64::consts::TAU;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::{synthesize_phase, PhaseTone, PhaseToneSet};
use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::rng::rng_from_seed;

pub const DEFAULT_MAGNETIC_RMS_HZ: f64 = 30e3;
pub const DEFAULT_MAGNETIC_F_MIN_HZ: f64 = 10.0;
pub const DEFAULT_MAGNETIC_F_MAX_HZ: f64 = 25e3;
pub const DEFAULT_LINEWIDTH_SIGMA_HZ: f64 = 346.0;
pub const DEFAULT_TONES_PER_DECADE: u32 = 10;

/// Low-frequency detuning noise, in Hz.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DetuningNoiseModel {
    /// Log-spaced tones between `f_min` and `f_max` with amplitudes ∝ 1/f,
    /// normalized so the ensemble RMS equals `rms`.
    OneOverF {
        rms: f64,
        f_min: f64,
        f_max: f64,
        tones_per_decade: u32,
    },
    /// One constant offset per realization drawn from N(0, sigma²).
    ShotToShotGaussian { sigma: f64 },
}

impl DetuningNoiseModel {
    pub fn magnetic_default() -> Self {
        DetuningNoiseModel::OneOverF {
            rms: DEFAULT_MAGNETIC_RMS_HZ,
            f_min: DEFAULT_MAGNETIC_F_MIN_HZ,
            f_max: DEFAULT_MAGNETIC_F_MAX_HZ,
            tones_per_decade: DEFAULT_TONES_PER_DECADE,
        }
    }

    pub fn linewidth_default() -> Self {
        DetuningNoiseModel::ShotToShotGaussian {
            sigma: DEFAULT_LINEWIDTH_SIGMA_HZ,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            DetuningNoiseModel::OneOverF {
                rms,
                f_min,
                f_max,
                tones_per_decade,
            } => {
                if !(rms.is_finite() && rms >= 0.0) {
                    return Err(Error::param("magnetic_rms_hz", "must be finite and >= 0"));
                }
                if !(f_min.is_finite() && f_min > 0.0) {
                    return Err(Error::param("magnetic_f_min_hz", "must be positive"));
                }
                if !(f_max.is_finite() && f_min < f_max) {
                    return Err(Error::param(
                        "magnetic_f_max_hz",
                        "f_min must be below f_max",
                    ));
                }
                if tones_per_decade == 0 {
                    return Err(Error::param("magnetic_tones_per_decade", "must be >= 1"));
                }
            }
            DetuningNoiseModel::ShotToShotGaussian { sigma } => {
                if !(sigma.is_finite() && sigma >= 0.0) {
                    return Err(Error::param(
                        "linewidth_sigma_hz",
                        "must be finite and >= 0",
                    ));
                }
            }
        }
        Ok(())
    }

    /// Frequencies and normalized amplitudes (Hz) of the 1/f tone comb.
    pub fn one_over_f_comb(
        rms: f64,
        f_min: f64,
        f_max: f64,
        tones_per_decade: u32,
    ) -> Vec<(f64, f64)> {
        let decades = (f_max / f_min).log10();
        let n = (decades * tones_per_decade as f64).floor() as usize + 1;
        let freqs: Vec<f64> = (0..n)
            .map(|i| f_min * 10f64.powf(i as f64 / tones_per_decade as f64))
            .filter(|&f| f <= f_max * (1.0 + 1e-12))
            .collect();
        let raw_power: f64 = freqs.iter().map(|f| 1.0 / (f * f)).sum::<f64>() / 2.0;
        let scale = if raw_power > 0.0 {
            rms / raw_power.sqrt()
        } else {
            0.0
        };
        freqs.into_iter().map(|f| (f, scale / f)).collect()
    }
}

/// Detuning contribution in Hz on a time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DetuningSeries {
    pub grid: TimeGrid,
    pub values: Vec<f64>,
}

impl DetuningSeries {
    pub fn zeros(grid: TimeGrid) -> Self {
        Self {
            grid,
            values: vec![0.0; grid.len],
        }
    }

    pub fn constant(grid: TimeGrid, value: f64) -> Self {
        Self {
            grid,
            values: vec![value; grid.len],
        }
    }

    pub fn rms(&self) -> f64 {
        if self.values.is_empty() {
            return 0.0;
        }
        (self.values.iter().map(|v| v * v).sum::<f64>() / self.values.len() as f64).sqrt()
    }
}

pub fn sample_detuning(
    model: &DetuningNoiseModel,
    grid: TimeGrid,
    seed: u64,
) -> Result<DetuningSeries> {
    model.validate()?;
    let mut rng = rng_from_seed(seed);
    match *model {
        DetuningNoiseModel::OneOverF {
            rms,
            f_min,
            f_max,
            tones_per_decade,
        } => {
            if rms == 0.0 {
                return Ok(DetuningSeries::zeros(grid));
            }
            let tones: Vec<PhaseTone> =
                DetuningNoiseModel::one_over_f_comb(rms, f_min, f_max, tones_per_decade)
                    .into_iter()
                    .map(|(frequency, amplitude)| PhaseTone {
                        frequency,
                        amplitude,
                        phase: rng.random::<f64>() * TAU,
                    })
                    .collect();
            let values = synthesize_phase(&PhaseToneSet::new(tones)?, grid)?.phi;
            Ok(DetuningSeries { grid, values })
        }
        DetuningNoiseModel::ShotToShotGaussian { sigma } => {
            let offset = if sigma == 0.0 {
                0.0
            } else {
                Normal::new(0.0, sigma)
                    .map_err(|e| Error::param("linewidth_sigma_hz", e.to_string()))?
                    .sample(&mut rng)
            };
            Ok(DetuningSeries::constant(grid, offset))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_rms_gives_zero_series() {
        let model = DetuningNoiseModel::OneOverF {
            rms: 0.0,
            f_min: 10.0,
            f_max: 25e3,
            tones_per_decade: 10,
        };
        let s = sample_detuning(&model, TimeGrid::new(0.0, 1e-6, 50), 3).unwrap();
        assert!(s.values.iter().all(|&v| v == 0.0));
        let g = DetuningNoiseModel::ShotToShotGaussian { sigma: 0.0 };
        let s = sample_detuning(&g, TimeGrid::new(0.0, 1e-6, 50), 3).unwrap();
        assert!(s.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn inverted_band_is_rejected() {
        let model = DetuningNoiseModel::OneOverF {
            rms: 1.0,
            f_min: 1e3,
            f_max: 1e3,
            tones_per_decade: 10,
        };
        assert!(sample_detuning(&model, TimeGrid::new(0.0, 1e-6, 5), 0).is_err());
    }

    #[test]
    fn comb_amplitudes_follow_inverse_frequency() {
        let comb = DetuningNoiseModel::one_over_f_comb(30e3, 10.0, 25e3, 10);
        assert!((comb[0].0 - 10.0).abs() < 1e-12);
        assert!(comb.last().unwrap().0 <= 25e3);
        for w in comb.windows(2) {
            let ratio = (w[0].1 * w[0].0) / (w[1].1 * w[1].0);
            assert!((ratio - 1.0).abs() < 1e-12);
        }
        let total: f64 = comb.iter().map(|(_, a)| a * a / 2.0).sum();
        assert!((total.sqrt() - 30e3).abs() < 1e-6);
    }

    #[test]
    fn gaussian_is_constant_per_realization() {
        let s = sample_detuning(
            &DetuningNoiseModel::linewidth_default(),
            TimeGrid::new(0.0, 1e-6, 20),
            11,
        )
        .unwrap();
        assert!(s.values.iter().all(|&v| v == s.values[0]));
        assert_ne!(s.values[0], 0.0);
    }

    #[test]
    fn identical_seeds_are_bit_identical() {
        let grid = TimeGrid::new(0.0, 1e-6, 64);
        for model in [
            DetuningNoiseModel::magnetic_default(),
            DetuningNoiseModel::linewidth_default(),
        ] {
            let a = sample_detuning(&model, grid, 5).unwrap();
            let b = sample_detuning(&model, grid, 5).unwrap();
            assert_eq!(a, b);
        }
    }
}

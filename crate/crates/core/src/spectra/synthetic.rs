use serde::{Deserialize, Serialize};

use super::{residual_factor, BeatNoteSpectrum, FeedforwardSettings, GainTable, SpectrumBin};
use crate::error::Result;

/// Parametric beat-note spectrum: a power-law floor plus a broad servo bump.
///
/// Levels are per resolution bin, in dBc. The bump rises from a sigmoid low
/// edge as `(f/f_peak)^rise_exponent`, peaks at `f_peak` and falls off as a
/// Gaussian in `ln f` above it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ServoBumpSpectrum {
    pub bin_width: f64,
    pub n_bins: usize,
    pub floor_dbc_at_1mhz: f64,
    pub floor_exponent: f64,
    pub bump_peak_dbc: f64,
    pub bump_peak_hz: f64,
    pub bump_edge_hz: f64,
    pub bump_edge_width: f64,
    pub bump_rise_exponent: f64,
    pub bump_fall_width: f64,
}

impl Default for ServoBumpSpectrum {
    /// The shape of the bundled `stokes_ff_off.csv`.
    fn default() -> Self {
        Self {
            bin_width: 25e3,
            n_bins: 200,
            floor_dbc_at_1mhz: -59.6,
            floor_exponent: 2.09,
            bump_peak_dbc: -38.4,
            bump_peak_hz: 2e6,
            bump_edge_hz: 290e3,
            bump_edge_width: 0.194,
            bump_rise_exponent: 0.5,
            bump_fall_width: 0.3,
        }
    }
}

impl ServoBumpSpectrum {
    /// Linear floor power (relative to the carrier) in the bin at `f`.
    pub fn floor_power(&self, f: f64) -> f64 {
        10f64.powf(self.floor_dbc_at_1mhz / 10.0) * (f / 1e6).powf(-self.floor_exponent)
    }

    pub fn bump_power(&self, f: f64) -> f64 {
        let x = (f / self.bump_peak_hz).ln();
        let edge = 1.0 / (1.0 + (-(f / self.bump_edge_hz).ln() / self.bump_edge_width).exp());
        let shape = if x < 0.0 {
            (self.bump_rise_exponent * x).exp()
        } else {
            (-x * x / (2.0 * self.bump_fall_width * self.bump_fall_width)).exp()
        };
        10f64.powf(self.bump_peak_dbc / 10.0) * edge * shape
    }

    /// Spectrum with the bump multiplied by `|r(f)|²` of `ff` (identity when disabled).
    pub fn spectrum(&self, ff: &FeedforwardSettings) -> Result<BeatNoteSpectrum> {
        ff.validate()?;
        let bins = (1..=self.n_bins)
            .map(|i| {
                let f = i as f64 * self.bin_width;
                let mut bump = self.bump_power(f);
                if ff.enabled {
                    bump *= residual_factor(ff.gain_at(f), ff.delay_mismatch, f).norm_sqr();
                }
                SpectrumBin {
                    frequency: f,
                    relative_power: 10.0 * (self.floor_power(f) + bump).log10(),
                }
            })
            .collect();
        BeatNoteSpectrum::new(bins, self.bin_width, 0.0)
    }
}

/// Feedforward matched to the bump: a 2 ns delay error and a gain that is exact up to
/// `1.5 MHz`, then droops so the suppression at `peak_hz` is `suppression_db`.
pub fn bump_feedforward(peak_hz: f64, suppression_db: f64) -> Result<FeedforwardSettings> {
    let delay = 2e-9;
    // |1 − g e^{−iφ}|² = (1 − g)² + 4 g sin²(φ/2) = 10^(−S/10), smaller root in g
    let x = 4.0 * (std::f64::consts::PI * peak_hz * delay).sin().powi(2);
    let target = 10f64.powf(-suppression_db / 10.0);
    let b = x - 2.0;
    let g_peak = (-b - (b * b - 4.0 * (1.0 - target)).sqrt()) / 2.0;
    Ok(FeedforwardSettings {
        enabled: true,
        gain: 1.0,
        delay_mismatch: delay,
        gain_vs_frequency: Some(GainTable::new(vec![(1.5e6, 1.0), (peak_hz, g_peak)])?),
    })
}

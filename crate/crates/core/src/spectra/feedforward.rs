use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{PhaseTone, PhaseToneSet};
use crate::error::{Error, Result};

pub const DEFAULT_SUPPRESSION_CEILING_DB: f64 = 120.0;

/// Relative FF gain versus frequency, linearly interpolated and held flat
/// outside the tabulated range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GainTable {
    points: Vec<(f64, f64)>,
}

impl GainTable {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::param("gain_vs_frequency", "table is empty"));
        }
        if points.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::param(
                "gain_vs_frequency",
                "frequencies must be strictly increasing",
            ));
        }
        if points
            .iter()
            .any(|&(f, g)| !(f.is_finite() && g.is_finite() && g >= 0.0))
        {
            return Err(Error::param(
                "gain_vs_frequency",
                "entries must be finite with gain >= 0",
            ));
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn at(&self, f: f64) -> f64 {
        let pts = &self.points;
        if f <= pts[0].0 {
            return pts[0].1;
        }
        if f >= pts[pts.len() - 1].0 {
            return pts[pts.len() - 1].1;
        }
        let i = pts.partition_point(|&(x, _)| x <= f);
        let (f0, g0) = pts[i - 1];
        let (f1, g1) = pts[i];
        g0 + (g1 - g0) * (f - f0) / (f1 - f0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeedforwardSettings {
    pub enabled: bool,
    pub gain: f64,
    /// Positive when the correction arrives late relative to the light.
    pub delay_mismatch: f64,
    pub gain_vs_frequency: Option<GainTable>,
}

impl Default for FeedforwardSettings {
    fn default() -> Self {
        Self {
            enabled: false,
            gain: 1.0,
            delay_mismatch: 0.0,
            gain_vs_frequency: None,
        }
    }
}

impl FeedforwardSettings {
    pub fn enabled(gain: f64, delay_mismatch: f64) -> Self {
        Self {
            enabled: true,
            gain,
            delay_mismatch,
            gain_vs_frequency: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gain.is_finite() && self.gain >= 0.0) {
            return Err(Error::param("ff_gain", "must be finite and >= 0"));
        }
        if !self.delay_mismatch.is_finite() {
            return Err(Error::param("ff_delay_mismatch", "must be finite"));
        }
        Ok(())
    }

    pub fn gain_at(&self, f: f64) -> f64 {
        match &self.gain_vs_frequency {
            Some(table) => self.gain * table.at(f),
            None => self.gain,
        }
    }
}

/// `1 − g·exp(−i 2π f τ)`: what remains of a tone after subtracting a delayed, scaled copy.
pub fn residual_factor(gain: f64, delay_mismatch: f64, f: f64) -> Complex64 {
    Complex64::new(1.0, 0.0) - Complex64::from_polar(gain, -TAU * f * delay_mismatch)
}

/// Scales each tone by `|r(f)|` and shifts its phase by `arg r(f)`. Identity when disabled.
pub fn apply_feedforward(tones: &PhaseToneSet, ff: &FeedforwardSettings) -> Result<PhaseToneSet> {
    ff.validate()?;
    if !ff.enabled {
        return Ok(tones.clone());
    }
    let out = tones
        .tones()
        .iter()
        .map(|tone| {
            let r = residual_factor(
                ff.gain_at(tone.frequency),
                ff.delay_mismatch,
                tone.frequency,
            );
            PhaseTone {
                frequency: tone.frequency,
                amplitude: tone.amplitude * r.norm(),
                phase: (tone.phase + r.arg()).rem_euclid(TAU),
            }
        })
        .collect();
    Ok(PhaseToneSet::from_parts_unchecked(out))
}

pub fn suppression_db(gain: f64, delay_mismatch: f64, f: f64) -> Result<f64> {
    suppression_db_with_ceiling(gain, delay_mismatch, f, DEFAULT_SUPPRESSION_CEILING_DB)
}

/// `−20 log10 |r(f)|`, clamped to `ceiling_db` where the residual vanishes.
pub fn suppression_db_with_ceiling(
    gain: f64,
    delay_mismatch: f64,
    f: f64,
    ceiling_db: f64,
) -> Result<f64> {
    if !(f.is_finite() && f > 0.0) {
        return Err(Error::param("f", "must be positive"));
    }
    let r = residual_factor(gain, delay_mismatch, f).norm();
    let db = -20.0 * r.log10();
    Ok(if db.is_nan() || db > ceiling_db {
        ceiling_db
    } else {
        db
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn tone_set() -> PhaseToneSet {
        PhaseToneSet::new(vec![
            PhaseTone {
                frequency: 1e5,
                amplitude: 0.01,
                phase: 0.5,
            },
            PhaseTone {
                frequency: 2e6,
                amplitude: 0.03,
                phase: 4.0,
            },
        ])
        .unwrap()
    }

    #[test]
    fn disabled_is_identity() {
        let tones = tone_set();
        let ff = FeedforwardSettings {
            enabled: false,
            gain: 0.3,
            delay_mismatch: 1e-7,
            gain_vs_frequency: None,
        };
        assert_eq!(apply_feedforward(&tones, &ff).unwrap(), tones);
    }

    #[test]
    fn perfect_cancellation() {
        let out = apply_feedforward(&tone_set(), &FeedforwardSettings::enabled(1.0, 0.0)).unwrap();
        assert!(out.tones().iter().all(|t| t.amplitude == 0.0));
    }

    #[test]
    fn best_measured_suppression() {
        let db = suppression_db(0.9646, 0.0, 1e6).unwrap();
        assert!((db - 29.02).abs() < 0.01, "{db}");
        let out =
            apply_feedforward(&tone_set(), &FeedforwardSettings::enabled(0.9646, 0.0)).unwrap();
        assert!((out.tones()[1].amplitude - 0.03 * 0.0354).abs() < 1e-12);
    }

    #[test]
    fn suppression_examples() {
        assert_eq!(
            suppression_db(1.0, 0.0, 3e5).unwrap(),
            DEFAULT_SUPPRESSION_CEILING_DB
        );
        assert!((suppression_db(0.9, 0.0, 1e6).unwrap() - 20.0).abs() < 1e-12);
        let expected = -20.0
            * (Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, -TAU * 1e6 * 55e-9))
                .norm()
                .log10();
        let got = suppression_db(1.0, 55e-9, 1e6).unwrap();
        assert!((got - expected).abs() < 1e-12);
        assert!((got - 9.25).abs() < 0.05, "{got}");
        assert!(suppression_db(1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn custom_ceiling() {
        assert_eq!(
            suppression_db_with_ceiling(1.0, 0.0, 1e6, 80.0).unwrap(),
            80.0
        );
    }

    #[test]
    fn gain_table_scales_gain() {
        let table = GainTable::new(vec![(1e6, 1.0), (3e6, 0.5)]).unwrap();
        assert_eq!(table.at(5e5), 1.0);
        assert!((table.at(2e6) - 0.75).abs() < 1e-15);
        assert_eq!(table.at(1e7), 0.5);
        let ff = FeedforwardSettings {
            enabled: true,
            gain: 1.0,
            delay_mismatch: 0.0,
            gain_vs_frequency: Some(table),
        };
        let out = apply_feedforward(&tone_set(), &ff).unwrap();
        assert_eq!(out.tones()[0].amplitude, 0.0);
        assert!((out.tones()[1].amplitude - 0.03 * 0.25).abs() < 1e-15);
    }

    #[test]
    fn negative_gain_rejected() {
        assert!(apply_feedforward(&tone_set(), &FeedforwardSettings::enabled(-0.1, 0.0)).is_err());
    }

    proptest! {
        #[test]
        fn zero_delay_suppression_is_frequency_independent(g in 0.0f64..2.0, f1 in 1e3f64..1e7, f2 in 1e3f64..1e7) {
            let a = suppression_db(g, 0.0, f1).unwrap();
            let b = suppression_db(g, 0.0, f2).unwrap();
            prop_assert!((a - b).abs() < 1e-9);
        }

        #[test]
        fn zero_delay_never_amplifies(g in 0.0f64..=2.0, amp in 0.0f64..0.1, phase in 0.0f64..std::f64::consts::TAU) {
            let tones = PhaseToneSet::new(vec![PhaseTone { frequency: 1e6, amplitude: amp, phase }]).unwrap();
            let out = apply_feedforward(&tones, &FeedforwardSettings::enabled(g, 0.0)).unwrap();
            prop_assert!(out.tones()[0].amplitude <= amp * (1.0 + 1e-15));
        }

        #[test]
        fn suppression_continuous_in_gain(g in 0.0f64..0.95, tau in -1e-7f64..1e-7) {
            let a = suppression_db(g, tau, 1e6).unwrap();
            let b = suppression_db(g + 1e-7, tau, 1e6).unwrap();
            prop_assert!((a - b).abs() < 1e-4);
        }
    }
}

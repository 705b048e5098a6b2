use std::f64::consts::TAU;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{dbc_to_modulation_index, BeatNoteSpectrum};
use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::rng::rng_from_seed;

/// One phase-modulation tone `amplitude * sin(2π frequency t + phase)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseTone {
    pub frequency: f64,
    pub amplitude: f64,
    pub phase: f64,
}

/// Sum-of-sinusoids model of a laser's phase noise.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PhaseToneSet {
    tones: Vec<PhaseTone>,
}

impl PhaseToneSet {
    pub fn new(tones: Vec<PhaseTone>) -> Result<Self> {
        for (i, tone) in tones.iter().enumerate() {
            if !(tone.frequency.is_finite() && tone.frequency > 0.0) {
                return Err(Error::InvalidTones(format!(
                    "tone {i}: frequency must be positive"
                )));
            }
            if !(tone.amplitude.is_finite() && tone.amplitude >= 0.0) {
                return Err(Error::InvalidTones(format!(
                    "tone {i}: amplitude must be finite and >= 0"
                )));
            }
            if !tone.phase.is_finite() {
                return Err(Error::InvalidTones(format!(
                    "tone {i}: phase must be finite"
                )));
            }
        }
        if tones.windows(2).any(|w| w[1].frequency <= w[0].frequency) {
            return Err(Error::InvalidTones(
                "frequencies must be strictly increasing".into(),
            ));
        }
        Ok(Self { tones })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn tones(&self) -> &[PhaseTone] {
        &self.tones
    }

    pub fn len(&self) -> usize {
        self.tones.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tones.is_empty()
    }

    pub fn max_frequency(&self) -> f64 {
        self.tones.last().map_or(0.0, |t| t.frequency)
    }

    /// `sqrt(Σ βᵢ² / 2)`, the RMS of the synthesized phase.
    pub fn rms_phase(&self) -> f64 {
        (self
            .tones
            .iter()
            .map(|t| t.amplitude * t.amplitude)
            .sum::<f64>()
            / 2.0)
            .sqrt()
    }

    pub(crate) fn from_parts_unchecked(tones: Vec<PhaseTone>) -> Self {
        Self { tones }
    }
}

/// One tone per spectrum bin at or above `f_cutoff_low`, with amplitude from the
/// narrowband phase-modulation sideband identity and a uniformly random phase.
pub fn tones_from_spectrum(
    spectrum: &BeatNoteSpectrum,
    f_cutoff_low: f64,
    seed: u64,
) -> Result<PhaseToneSet> {
    if !(f_cutoff_low.is_finite() && f_cutoff_low > 0.0) {
        return Err(Error::param("f_cutoff_low", "must be positive"));
    }
    let mut rng = rng_from_seed(seed);
    let tones: Vec<PhaseTone> = spectrum
        .bins()
        .iter()
        .filter(|bin| bin.frequency >= f_cutoff_low)
        .map(|bin| {
            let phase = (rng.random::<f64>() * TAU) % TAU;
            PhaseTone {
                frequency: bin.frequency,
                amplitude: dbc_to_modulation_index(bin.relative_power),
                phase,
            }
        })
        .collect();
    if tones.is_empty() {
        return Err(Error::NoTonesAboveCutoff {
            cutoff_hz: f_cutoff_low,
        });
    }
    PhaseToneSet::new(tones)
}

/// Sampled phase `phi(t)` and its analytic derivative on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseTrajectory {
    pub grid: TimeGrid,
    pub phi: Vec<f64>,
    pub phi_dot: Vec<f64>,
    /// Highest tone frequency present, used by the integrator's step check.
    pub max_tone_frequency: f64,
}

impl PhaseTrajectory {
    pub fn zeros(grid: TimeGrid) -> Self {
        Self {
            grid,
            phi: vec![0.0; grid.len],
            phi_dot: vec![0.0; grid.len],
            max_tone_frequency: 0.0,
        }
    }
}

// Exact re-evaluation interval for the phasor recurrence.
const REANCHOR_EVERY: usize = 512;
const LANES: usize = 8;

/// Evaluates `phi(t) = Σ βᵢ sin(2π fᵢ t + ψᵢ)` and its closed-form derivative on `grid`.
///
/// Each tone is advanced as a unit phasor multiplied by `exp(i 2π fᵢ dt)` and
/// re-anchored with an exact `sin_cos` every few hundred samples, so values
/// agree with direct evaluation to rounding.
pub fn synthesize_phase(tones: &PhaseToneSet, grid: TimeGrid) -> Result<PhaseTrajectory> {
    let f_max = tones.max_frequency();
    if tones.is_empty() {
        return Ok(PhaseTrajectory::zeros(grid));
    }
    if grid.len > 1 && !(grid.step > 0.0 && grid.sample_rate() >= 10.0 * f_max) {
        return Err(Error::Undersampled {
            sample_rate_hz: grid.sample_rate(),
            max_tone_hz: f_max,
        });
    }

    let n = grid.len;
    let mut phi = vec![0.0; n];
    let mut phi_dot = vec![0.0; n];

    // structure-of-arrays padded to whole lanes; padding tones have zero amplitude
    let m = tones.len().div_ceil(LANES) * LANES;
    let mut omega = vec![0.0; m];
    let mut phase0 = vec![0.0; m];
    let mut amp = vec![0.0; m];
    let mut amp_w = vec![0.0; m];
    for (j, t) in tones.tones().iter().enumerate() {
        omega[j] = TAU * t.frequency;
        phase0[j] = t.phase;
        amp[j] = t.amplitude;
        amp_w[j] = t.amplitude * omega[j];
    }
    let (rot_s, rot_c): (Vec<f64>, Vec<f64>) =
        omega.iter().map(|w| (w * grid.step).sin_cos()).unzip();
    let mut re = vec![0.0; m];
    let mut im = vec![0.0; m];

    for block_start in (0..n).step_by(REANCHOR_EVERY) {
        let t0 = grid.time(block_start);
        for j in 0..m {
            let (s, c) = (omega[j] * t0 + phase0[j]).sin_cos();
            re[j] = c;
            im[j] = s;
        }
        let block_end = (block_start + REANCHOR_EVERY).min(n);
        for k in block_start..block_end {
            let mut p = [0.0; LANES];
            let mut pd = [0.0; LANES];
            let lanes = re
                .chunks_exact_mut(LANES)
                .zip(im.chunks_exact_mut(LANES))
                .zip(amp.chunks_exact(LANES).zip(amp_w.chunks_exact(LANES)))
                .zip(rot_c.chunks_exact(LANES).zip(rot_s.chunks_exact(LANES)));
            for (((re, im), (a, aw)), (c, s)) in lanes {
                for l in 0..LANES {
                    p[l] += a[l] * im[l];
                    pd[l] += aw[l] * re[l];
                    let r = re[l] * c[l] - im[l] * s[l];
                    im[l] = re[l] * s[l] + im[l] * c[l];
                    re[l] = r;
                }
            }
            phi[k] = p.iter().sum();
            phi_dot[k] = pd.iter().sum();
        }
    }

    Ok(PhaseTrajectory {
        grid,
        phi,
        phi_dot,
        max_tone_frequency: f_max,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectra::SpectrumBin;

    fn spectrum(bins: &[(f64, f64)]) -> BeatNoteSpectrum {
        BeatNoteSpectrum::new(
            bins.iter()
                .map(|&(f, p)| SpectrumBin {
                    frequency: f,
                    relative_power: p,
                })
                .collect(),
            1e4,
            0.0,
        )
        .unwrap()
    }

    #[test]
    fn forty_dbc_bin_gives_twenty_milliradians() {
        let s = spectrum(&[(1e6, -60.0), (2e6, -40.0)]);
        let tones = tones_from_spectrum(&s, 25e3, 1).unwrap();
        assert!((tones.tones()[1].amplitude - 0.02).abs() < 1e-15);
    }

    #[test]
    fn equal_bins_give_equal_amplitudes() {
        let s = spectrum(&[(1e6, -46.0), (1.1e6, -46.0)]);
        let tones = tones_from_spectrum(&s, 25e3, 1).unwrap();
        let expected = 2.0 * 10f64.powf(-2.3);
        assert!((expected - 0.010_024).abs() < 1e-5);
        for t in tones.tones() {
            assert!((t.amplitude - expected).abs() < 1e-15);
        }
    }

    #[test]
    fn cutoff_filters_and_errors_when_nothing_left() {
        let s = spectrum(&[(10e3, -40.0), (20e3, -40.0), (30e3, -50.0)]);
        let tones = tones_from_spectrum(&s, 25e3, 3).unwrap();
        assert_eq!(tones.len(), 1);
        assert_eq!(tones.tones()[0].frequency, 30e3);
        assert!(matches!(
            tones_from_spectrum(&s, 1e6, 3),
            Err(Error::NoTonesAboveCutoff { .. })
        ));
    }

    #[test]
    fn phases_in_range_and_reproducible() {
        let s = spectrum(&[(1e5, -40.0), (2e5, -40.0), (3e5, -40.0)]);
        let a = tones_from_spectrum(&s, 25e3, 99).unwrap();
        let b = tones_from_spectrum(&s, 25e3, 99).unwrap();
        let c = tones_from_spectrum(&s, 25e3, 100).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert!(a.tones().iter().all(|t| (0.0..TAU).contains(&t.phase)));
    }

    #[test]
    fn empty_tone_set_synthesizes_zero() {
        let grid = TimeGrid::new(0.0, 1e-8, 100);
        let tr = synthesize_phase(&PhaseToneSet::empty(), grid).unwrap();
        assert!(tr.phi.iter().chain(&tr.phi_dot).all(|&v| v == 0.0));
    }

    #[test]
    fn single_tone_at_origin() {
        let tones = PhaseToneSet::new(vec![PhaseTone {
            frequency: 1e6,
            amplitude: 0.02,
            phase: 0.0,
        }])
        .unwrap();
        let tr = synthesize_phase(&tones, TimeGrid::new(0.0, 1e-8, 10)).unwrap();
        assert_eq!(tr.phi[0], 0.0);
        assert!((tr.phi_dot[0] - 1.256_637e5).abs() < 1.0);
        assert!((tr.phi_dot[0] - 0.02 * TAU * 1e6).abs() < 1e-9);
    }

    #[test]
    fn undersampled_grid_is_rejected() {
        let tones = PhaseToneSet::new(vec![PhaseTone {
            frequency: 1e6,
            amplitude: 0.02,
            phase: 0.0,
        }])
        .unwrap();
        let err = synthesize_phase(&tones, TimeGrid::new(0.0, 2e-7, 10)).unwrap_err();
        assert!(err
            .to_string()
            .contains("sample rate below 10× max tone frequency"));
    }

    #[test]
    fn recurrence_matches_direct_evaluation() {
        let tones = PhaseToneSet::new(vec![
            PhaseTone {
                frequency: 3.1e5,
                amplitude: 0.01,
                phase: 0.3,
            },
            PhaseTone {
                frequency: 1.7e6,
                amplitude: 0.004,
                phase: 2.0,
            },
            PhaseTone {
                frequency: 4.9e6,
                amplitude: 0.002,
                phase: 5.5,
            },
        ])
        .unwrap();
        let grid = TimeGrid::new(0.0, 3e-9, 5000);
        let tr = synthesize_phase(&tones, grid).unwrap();
        for k in (0..grid.len).step_by(97) {
            let t = grid.time(k);
            let (mut p, mut pd) = (0.0, 0.0);
            for tone in tones.tones() {
                let arg = TAU * tone.frequency * t + tone.phase;
                p += tone.amplitude * arg.sin();
                pd += tone.amplitude * TAU * tone.frequency * arg.cos();
            }
            assert!((tr.phi[k] - p).abs() < 1e-12);
            assert!((tr.phi_dot[k] - pd).abs() < 1e-12 * pd.abs().max(1e5));
        }
    }
}

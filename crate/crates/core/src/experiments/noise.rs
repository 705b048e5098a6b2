use crate::dynamics::{DetuningTrace, NoiseFactory, NoiseRealization};
use crate::error::Result;
use crate::grid::TimeGrid;
use crate::rng::{derive_seed, stream_seed, SourceId};
use crate::spectra::{
    apply_feedforward, sample_detuning, synthesize_phase, tones_from_spectrum, BeatNoteSpectrum,
    DetuningNoiseModel, FeedforwardSettings, PhaseTrajectory, DEFAULT_CUTOFF_HZ,
};

/// Phase noise of one laser: a beat-note spectrum plus the feedforward applied to it.
#[derive(Debug, Clone, PartialEq)]
pub struct LaserNoise {
    pub spectrum: BeatNoteSpectrum,
    pub feedforward: FeedforwardSettings,
}

impl LaserNoise {
    pub fn new(spectrum: BeatNoteSpectrum) -> Self {
        Self {
            spectrum,
            feedforward: FeedforwardSettings::default(),
        }
    }

    pub fn with_feedforward(mut self, feedforward: FeedforwardSettings) -> Self {
        self.feedforward = feedforward;
        self
    }

    fn trajectory(&self, cutoff: f64, seed: u64, grid: TimeGrid) -> Result<PhaseTrajectory> {
        let tones = tones_from_spectrum(&self.spectrum, cutoff, seed)?;
        let tones = apply_feedforward(&tones, &self.feedforward)?;
        synthesize_phase(&tones, grid)
    }

    fn max_tone_frequency(&self, cutoff: f64) -> f64 {
        self.spectrum
            .bins()
            .iter()
            .map(|b| b.frequency)
            .filter(|&f| f >= cutoff)
            .fold(0.0, f64::max)
    }
}

/// Every noise source acting on the two lasers and the molecule.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseSources {
    pub stokes: Option<LaserNoise>,
    pub pump: Option<LaserNoise>,
    pub cutoff: f64,
    pub detuning: Vec<DetuningNoiseModel>,
    /// Fraction of the detuning noise that also shifts the one-photon detuning.
    pub one_photon_weight: f64,
}

impl NoiseSources {
    pub fn quiet() -> Self {
        Self {
            stokes: None,
            pump: None,
            cutoff: DEFAULT_CUTOFF_HZ,
            detuning: Vec::new(),
            one_photon_weight: 1.0,
        }
    }

    /// The same spectrum on both lasers plus magnetic and linewidth detuning noise.
    pub fn symmetric(spectrum: BeatNoteSpectrum) -> Self {
        Self {
            stokes: Some(LaserNoise::new(spectrum.clone())),
            pump: Some(LaserNoise::new(spectrum)),
            cutoff: DEFAULT_CUTOFF_HZ,
            detuning: vec![
                DetuningNoiseModel::magnetic_default(),
                DetuningNoiseModel::linewidth_default(),
            ],
            one_photon_weight: 1.0,
        }
    }

    fn source_id(model: &DetuningNoiseModel) -> SourceId {
        match model {
            DetuningNoiseModel::OneOverF { .. } => SourceId::Magnetic,
            DetuningNoiseModel::ShotToShotGaussian { .. } => SourceId::Linewidth,
        }
    }
}

impl NoiseFactory for NoiseSources {
    fn max_tone_frequency(&self) -> f64 {
        [&self.stokes, &self.pump]
            .into_iter()
            .flatten()
            .map(|l| l.max_tone_frequency(self.cutoff))
            .fold(0.0, f64::max)
    }

    fn realize(
        &self,
        realization_seed: u64,
        pass: u32,
        grid: TimeGrid,
    ) -> Result<NoiseRealization> {
        let pass = u64::from(pass);
        let phase = |laser: &Option<LaserNoise>, source| match laser {
            Some(l) => l.trajectory(
                self.cutoff,
                stream_seed(realization_seed, pass, source),
                grid,
            ),
            None => Ok(PhaseTrajectory::zeros(grid)),
        };
        let phase_s = phase(&self.stokes, SourceId::StokesPhase)?;
        let phase_p = phase(&self.pump, SourceId::PumpPhase)?;
        let series = self
            .detuning
            .iter()
            .enumerate()
            .map(|(i, model)| {
                let seed = derive_seed(
                    stream_seed(realization_seed, pass, Self::source_id(model)),
                    &[i as u64],
                );
                sample_detuning(model, grid, seed)
            })
            .collect::<Result<Vec<_>>>()?;
        let detuning = DetuningTrace::from_series(grid, &series, self.one_photon_weight)?;
        Ok(NoiseRealization {
            phase_s,
            phase_p,
            detuning,
        })
    }
}

//! Beat-note spectra, phase-noise tone models, the feedforward residual model and
//! low-frequency detuning noise.

mod beatnote;
mod detuning;
mod feedforward;
mod synthetic;
mod tones;

pub use beatnote::{BeatNoteSpectrum, SpectrumBin};
pub use detuning::{sample_detuning, DetuningNoiseModel, DetuningSeries};
pub use feedforward::{
    apply_feedforward, residual_factor, suppression_db, suppression_db_with_ceiling,
    FeedforwardSettings, GainTable, DEFAULT_SUPPRESSION_CEILING_DB,
};
pub use synthetic::{bump_feedforward, ServoBumpSpectrum};
pub use tones::{synthesize_phase, tones_from_spectrum, PhaseTone, PhaseToneSet, PhaseTrajectory};

/// Cavity linewidth; phase noise below this is common to both lasers and excluded.
pub const DEFAULT_CUTOFF_HZ: f64 = 25e3;

/// Phase-modulation index of a tone whose single sideband sits `dbc` below the carrier.
pub fn dbc_to_modulation_index(dbc: f64) -> f64 {
    2.0 * 10f64.powf(dbc / 20.0)
}

pub fn modulation_index_to_dbc(beta: f64) -> f64 {
    20.0 * (beta / 2.0).log10()
}

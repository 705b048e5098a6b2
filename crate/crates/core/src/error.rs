use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid spectrum: {0}")]
    InvalidSpectrum(String),

    #[error("no tones above cutoff ({cutoff_hz} Hz)")]
    NoTonesAboveCutoff { cutoff_hz: f64 },

    #[error("invalid tone set: {0}")]
    InvalidTones(String),

    #[error(
        "sample rate below 10× max tone frequency ({sample_rate_hz} Hz < 10 × {max_tone_hz} Hz)"
    )]
    Undersampled {
        sample_rate_hz: f64,
        max_tone_hz: f64,
    },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("mixing angle undefined: both Rabi frequencies are zero")]
    MixingAngleUndefined,

    #[error("time {t} s outside pulse window [0, {duration}] s")]
    TimeOutOfRange { t: f64, duration: f64 },

    #[error("integration step {step} s exceeds the allowed maximum {limit} s")]
    StepTooLarge { step: f64, limit: f64 },

    #[error("noise trace does not cover the integration grid: {0}")]
    GridMismatch(String),

    #[error("integration diverged at t = {t} s")]
    Diverged { t: f64 },

    #[error("fit did not converge after {iterations} iterations (cost {cost:e}, residual rms {residual_rms:e})")]
    FitNotConverged {
        iterations: usize,
        cost: f64,
        residual_rms: f64,
    },

    #[error("degenerate fit data: {0}")]
    DegenerateData(String),

    #[error("molecule ends in ground state, not detectable (N = {0})")]
    OddPassCount(u32),

    #[error("config error in {path}: {message}")]
    Config { path: PathBuf, message: String },

    #[error("unknown {kind} `{name}` (available: {available})")]
    UnknownStrategy {
        kind: &'static str,
        name: String,
        available: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn param(name: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name: name.into(),
            reason: reason.into(),
        }
    }
}

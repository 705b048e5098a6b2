//! Run configuration: a flat TOML table in lab units (Hz, µs, ns).
//!
//! Every key has a default, unknown keys are rejected, and the fully
//! resolved table is written next to the results of each run.

use std::f64::consts::TAU;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dynamics::StirapParams;
use crate::error::{Error, Result};
use crate::experiments::{DurationSearch, EnsembleSpec, LaserNoise, NoiseSources};
use crate::model::FitterRegistry;
use crate::runner::ExperimentRegistry;
use crate::spectra::{BeatNoteSpectrum, DetuningNoiseModel, FeedforwardSettings};

pub const BUILTIN_FF_OFF: &str = "builtin:stokes_ff_off";
pub const BUILTIN_FF_ON: &str = "builtin:stokes_ff_on";
/// Spectrum value that switches a laser's phase noise off.
pub const NO_SPECTRUM: &str = "none";

const FF_OFF_CSV: &str = include_str!("../data/stokes_ff_off.csv");
const FF_ON_CSV: &str = include_str!("../data/stokes_ff_on.csv");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub experiment: String,
    pub output_dir: String,

    pub omega_p_max_hz: f64,
    pub omega_s_max_hz: f64,
    pub gamma_hz: f64,
    pub delta_one_photon_hz: f64,
    pub delta_two_photon_hz: f64,
    pub pulse_duration_us: f64,
    pub n_passes: u32,

    /// Path, `builtin:stokes_ff_off`, `builtin:stokes_ff_on` or `none`.
    pub stokes_spectrum: String,
    /// Same forms as `stokes_spectrum`; empty means "same as Stokes".
    pub pump_spectrum: String,
    pub cutoff_hz: f64,
    pub stokes_ff_enabled: bool,
    pub stokes_ff_gain: f64,
    pub stokes_ff_delay_ns: f64,
    pub pump_ff_enabled: bool,
    pub pump_ff_gain: f64,
    pub pump_ff_delay_ns: f64,

    pub magnetic_rms_hz: f64,
    pub magnetic_f_min_hz: f64,
    pub magnetic_f_max_hz: f64,
    pub magnetic_tones_per_decade: u32,
    pub linewidth_sigma_hz: f64,
    pub one_photon_weight: f64,

    pub n_realizations: usize,
    pub master_seed: u64,

    /// Explicit durations; when empty a log grid from the three keys below is used.
    pub durations_us: Vec<f64>,
    pub duration_min_us: f64,
    pub duration_max_us: f64,
    pub duration_points: usize,

    pub pass_counts: Vec<u32>,

    pub omega_bar_hz: Vec<f64>,
    pub t_search_min_us: f64,
    pub t_search_max_us: f64,
    pub t_search_points: usize,
    pub t_search_tolerance: f64,

    pub gain_min: f64,
    pub gain_max: f64,
    pub gain_points: usize,
    pub suppression_delay_ns: f64,
    pub suppression_frequency_hz: f64,

    pub fit_kind: String,
    pub fit_input: String,

    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            experiment: String::new(),
            output_dir: "results".into(),
            omega_p_max_hz: 1170e3,
            omega_s_max_hz: 1190e3,
            gamma_hz: 35e3,
            delta_one_photon_hz: 0.0,
            delta_two_photon_hz: 0.0,
            pulse_duration_us: 23.85,
            n_passes: 10,
            stokes_spectrum: BUILTIN_FF_OFF.into(),
            pump_spectrum: String::new(),
            cutoff_hz: 25e3,
            stokes_ff_enabled: false,
            stokes_ff_gain: 1.0,
            stokes_ff_delay_ns: 0.0,
            pump_ff_enabled: false,
            pump_ff_gain: 1.0,
            pump_ff_delay_ns: 0.0,
            magnetic_rms_hz: 30e3,
            magnetic_f_min_hz: 10.0,
            magnetic_f_max_hz: 25e3,
            magnetic_tones_per_decade: 10,
            linewidth_sigma_hz: 346.0,
            one_photon_weight: 1.0,
            n_realizations: 200,
            master_seed: 1,
            durations_us: Vec::new(),
            duration_min_us: 1.0,
            duration_max_us: 200.0,
            duration_points: 16,
            pass_counts: vec![2, 4, 6, 8, 10, 12],
            omega_bar_hz: vec![
                0.2e6, 0.3e6, 0.5e6, 0.7e6, 0.85e6, 1.0e6, 1.18e6, 1.5e6, 2e6, 3e6, 4e6,
            ],
            t_search_min_us: 1.0,
            t_search_max_us: 1000.0,
            t_search_points: 76,
            t_search_tolerance: 0.005,
            gain_min: 0.5,
            gain_max: 1.5,
            gain_points: 101,
            suppression_delay_ns: 0.0,
            suppression_frequency_hz: 1e6,
            fit_kind: "eta".into(),
            fit_input: String::new(),
            base_dir: PathBuf::new(),
        }
    }
}

fn field(name: &str, reason: impl Into<String>) -> Error {
    Error::param(name, reason)
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(field(name, format!("must be positive, got {v}")))
    }
}

fn non_negative(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(field(name, format!("must be finite and >= 0, got {v}")))
    }
}

fn finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(field(name, format!("must be finite, got {v}")))
    }
}

/// Reads, parses and validates a config file.
pub fn load_config(path: impl AsRef<Path>) -> Result<RunConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::Config {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    RunConfig::from_toml(&text, base).map_err(|e| match e {
        Error::Config { message, .. } => Error::Config {
            path: path.to_path_buf(),
            message,
        },
        other => Error::Config {
            path: path.to_path_buf(),
            message: other.to_string(),
        },
    })
}

impl RunConfig {
    /// Parses and validates config text; relative paths resolve against `base_dir`.
    pub fn from_toml(text: &str, base_dir: impl Into<PathBuf>) -> Result<Self> {
        let mut config: RunConfig = toml::from_str(text).map_err(|e| Error::Config {
            path: PathBuf::new(),
            message: e.to_string(),
        })?;
        config.base_dir = base_dir.into();
        config.validate()?;
        Ok(config)
    }

    /// The resolved table, every key written out.
    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config {
            path: PathBuf::new(),
            message: e.to_string(),
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.experiment.is_empty() {
            return Err(field("experiment", "missing"));
        }
        ExperimentRegistry::builtin()
            .get(&self.experiment)
            .map_err(|e| field("experiment", e.to_string()))?;
        positive("omega_p_max_hz", self.omega_p_max_hz)?;
        positive("omega_s_max_hz", self.omega_s_max_hz)?;
        non_negative("gamma_hz", self.gamma_hz)?;
        finite("delta_one_photon_hz", self.delta_one_photon_hz)?;
        finite("delta_two_photon_hz", self.delta_two_photon_hz)?;
        positive("pulse_duration_us", self.pulse_duration_us)?;
        if self.n_passes < 1 {
            return Err(field("n_passes", "must be >= 1"));
        }
        positive("cutoff_hz", self.cutoff_hz)?;
        non_negative("stokes_ff_gain", self.stokes_ff_gain)?;
        finite("stokes_ff_delay_ns", self.stokes_ff_delay_ns)?;
        non_negative("pump_ff_gain", self.pump_ff_gain)?;
        finite("pump_ff_delay_ns", self.pump_ff_delay_ns)?;
        self.detuning_models()?
            .iter()
            .try_for_each(DetuningNoiseModel::validate)?;
        non_negative("one_photon_weight", self.one_photon_weight)?;
        if self.n_realizations < 1 {
            return Err(field("n_realizations", "must be >= 1"));
        }
        for &t in &self.durations_us {
            positive("durations_us", t)?;
        }
        if self.durations_us.windows(2).any(|w| w[1] <= w[0]) {
            return Err(field("durations_us", "must be strictly increasing"));
        }
        positive("duration_min_us", self.duration_min_us)?;
        if !(self.duration_max_us.is_finite() && self.duration_max_us > self.duration_min_us) {
            return Err(field("duration_max_us", "must exceed duration_min_us"));
        }
        if self.duration_points < 2 {
            return Err(field("duration_points", "must be >= 2"));
        }
        if let Some(&n) = self.pass_counts.iter().find(|&&n| n % 2 == 1) {
            return Err(field(
                "pass_counts",
                format!("odd pass count {n}: molecule ends in ground state"),
            ));
        }
        for &o in &self.omega_bar_hz {
            positive("omega_bar_hz", o)?;
        }
        self.duration_search().validate().map_err(|e| match e {
            Error::InvalidParameter { reason, .. } => {
                field("t_search_min_us/t_search_max_us/t_search_points", reason)
            }
            other => other,
        })?;
        positive("t_search_tolerance", self.t_search_tolerance)?;
        non_negative("gain_min", self.gain_min)?;
        if !(self.gain_max.is_finite() && self.gain_max >= self.gain_min) {
            return Err(field("gain_max", "must be >= gain_min"));
        }
        if self.gain_points < 2 {
            return Err(field("gain_points", "must be >= 2"));
        }
        finite("suppression_delay_ns", self.suppression_delay_ns)?;
        positive("suppression_frequency_hz", self.suppression_frequency_hz)?;
        if self.experiment == "fit_only" {
            if self.fit_input.is_empty() {
                return Err(field("fit_input", "required for fit_only"));
            }
            FitterRegistry::builtin(self.n_passes)
                .get(&self.fit_kind)
                .map_err(|e| field("fit_kind", e.to_string()))?;
        }
        self.noise_sources()?;
        Ok(())
    }

    pub fn stirap_params(&self) -> StirapParams {
        StirapParams {
            omega_p_max: TAU * self.omega_p_max_hz,
            omega_s_max: TAU * self.omega_s_max_hz,
            delta_one_photon: TAU * self.delta_one_photon_hz,
            delta_two_photon_static: TAU * self.delta_two_photon_hz,
            gamma: TAU * self.gamma_hz,
            pulse_duration: self.pulse_duration_us * 1e-6,
            n_passes: self.n_passes,
        }
    }

    pub fn resolve_path(&self, p: &str) -> PathBuf {
        let p = Path::new(p);
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    /// A copy whose file references no longer depend on where the config lived.
    pub fn resolved(&self) -> Self {
        let abs = |v: &str| match v {
            "" | NO_SPECTRUM | BUILTIN_FF_OFF | BUILTIN_FF_ON => v.to_string(),
            p => {
                let path = self.resolve_path(p);
                std::path::absolute(&path)
                    .unwrap_or(path)
                    .to_string_lossy()
                    .into_owned()
            }
        };
        Self {
            output_dir: abs(&self.output_dir),
            stokes_spectrum: abs(&self.stokes_spectrum),
            pump_spectrum: abs(&self.pump_spectrum),
            fit_input: abs(&self.fit_input),
            ..self.clone()
        }
    }

    pub fn output_path(&self) -> PathBuf {
        self.resolve_path(&self.output_dir)
    }

    fn load_spectrum(&self, key: &str, value: &str) -> Result<Option<BeatNoteSpectrum>> {
        let parsed = match value {
            NO_SPECTRUM => return Ok(None),
            BUILTIN_FF_OFF => BeatNoteSpectrum::from_csv_reader(FF_OFF_CSV.as_bytes()),
            BUILTIN_FF_ON => BeatNoteSpectrum::from_csv_reader(FF_ON_CSV.as_bytes()),
            path => BeatNoteSpectrum::from_csv_path(self.resolve_path(path)),
        };
        parsed
            .map(Some)
            .map_err(|e| field(key, format!("cannot load `{value}`: {e}")))
    }

    fn detuning_models(&self) -> Result<Vec<DetuningNoiseModel>> {
        Ok(vec![
            DetuningNoiseModel::OneOverF {
                rms: self.magnetic_rms_hz,
                f_min: self.magnetic_f_min_hz,
                f_max: self.magnetic_f_max_hz,
                tones_per_decade: self.magnetic_tones_per_decade,
            },
            DetuningNoiseModel::ShotToShotGaussian {
                sigma: self.linewidth_sigma_hz,
            },
        ])
    }

    pub fn noise_sources(&self) -> Result<NoiseSources> {
        let ff = |enabled, gain, delay_ns: f64| FeedforwardSettings {
            enabled,
            gain,
            delay_mismatch: delay_ns * 1e-9,
            gain_vs_frequency: None,
        };
        let stokes = self.load_spectrum("stokes_spectrum", &self.stokes_spectrum)?;
        let pump = if self.pump_spectrum.is_empty() {
            stokes.clone()
        } else {
            self.load_spectrum("pump_spectrum", &self.pump_spectrum)?
        };
        Ok(NoiseSources {
            stokes: stokes.map(|s| {
                LaserNoise::new(s).with_feedforward(ff(
                    self.stokes_ff_enabled,
                    self.stokes_ff_gain,
                    self.stokes_ff_delay_ns,
                ))
            }),
            pump: pump.map(|s| {
                LaserNoise::new(s).with_feedforward(ff(
                    self.pump_ff_enabled,
                    self.pump_ff_gain,
                    self.pump_ff_delay_ns,
                ))
            }),
            cutoff: self.cutoff_hz,
            detuning: self.detuning_models()?,
            one_photon_weight: self.one_photon_weight,
        })
    }

    pub fn ensemble(&self) -> Result<EnsembleSpec> {
        Ok(EnsembleSpec::new(
            self.n_realizations,
            self.master_seed,
            self.noise_sources()?,
        ))
    }

    /// Durations in seconds.
    pub fn durations(&self) -> Vec<f64> {
        if !self.durations_us.is_empty() {
            return self.durations_us.iter().map(|t| t * 1e-6).collect();
        }
        let (lo, hi) = (self.duration_min_us.ln(), self.duration_max_us.ln());
        let n = self.duration_points;
        (0..n)
            .map(|i| (lo + (hi - lo) * i as f64 / (n - 1) as f64).exp() * 1e-6)
            .collect()
    }

    pub fn duration_search(&self) -> DurationSearch {
        DurationSearch {
            t_min: self.t_search_min_us * 1e-6,
            t_max: self.t_search_max_us * 1e-6,
            n_grid: self.t_search_points,
            tolerance: self.t_search_tolerance,
        }
    }

    pub fn gains(&self) -> Vec<f64> {
        let n = self.gain_points;
        (0..n)
            .map(|i| self.gain_min + (self.gain_max - self.gain_min) * i as f64 / (n - 1) as f64)
            .collect()
    }
}

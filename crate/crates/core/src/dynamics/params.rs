use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Everything the bright/dark Hamiltonian needs. All rates are angular (rad/s).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StirapParams {
    pub omega_p_max: f64,
    pub omega_s_max: f64,
    pub delta_one_photon: f64,
    pub delta_two_photon_static: f64,
    pub gamma: f64,
    pub pulse_duration: f64,
    pub n_passes: u32,
}

impl StirapParams {
    /// Measured operating point: Ω_P/2π = 1170 kHz, Ω_S/2π = 1190 kHz, γ/2π = 35 kHz.
    pub fn experimental(pulse_duration: f64, n_passes: u32) -> Self {
        Self {
            omega_p_max: TAU * 1170e3,
            omega_s_max: TAU * 1190e3,
            delta_one_photon: 0.0,
            delta_two_photon_static: 0.0,
            gamma: TAU * 35e3,
            pulse_duration,
            n_passes,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::param(name, format!("must be positive, got {v}")))
            }
        };
        positive("omega_p_max", self.omega_p_max)?;
        positive("omega_s_max", self.omega_s_max)?;
        positive("pulse_duration", self.pulse_duration)?;
        if !(self.gamma.is_finite() && self.gamma >= 0.0) {
            return Err(Error::param("gamma", "must be finite and >= 0"));
        }
        if !self.delta_one_photon.is_finite() {
            return Err(Error::param("delta_one_photon", "must be finite"));
        }
        if !self.delta_two_photon_static.is_finite() {
            return Err(Error::param("delta_two_photon_static", "must be finite"));
        }
        if self.n_passes < 1 {
            return Err(Error::param("n_passes", "must be >= 1"));
        }
        Ok(())
    }

    /// `(Ω_P + Ω_S) / 2`.
    pub fn omega_bar(&self) -> f64 {
        0.5 * (self.omega_p_max + self.omega_s_max)
    }

    /// Same pump/Stokes ratio, rescaled to average peak Rabi frequency `omega_bar`.
    pub fn with_omega_bar(&self, omega_bar: f64) -> Self {
        let scale = omega_bar / self.omega_bar();
        Self {
            omega_p_max: self.omega_p_max * scale,
            omega_s_max: self.omega_s_max * scale,
            ..self.clone()
        }
    }

    pub fn with_duration(&self, pulse_duration: f64) -> Self {
        Self {
            pulse_duration,
            ..self.clone()
        }
    }
}

/// Forward passes transfer F→G; reverse passes play the envelopes backwards to return G→F.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PassDirection {
    Forward,
    Reverse,
}

impl PassDirection {
    /// Passes alternate starting with a forward transfer.
    pub fn for_pass(index: u32) -> Self {
        if index.is_multiple_of(2) {
            PassDirection::Forward
        } else {
            PassDirection::Reverse
        }
    }
}

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `exp(−τ_adi/T − T/τ_deph)`. Pass `f64::INFINITY` for `tau_deph` to switch dephasing off.
pub fn eta_model(t: f64, tau_adi: f64, tau_deph: f64) -> Result<f64> {
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::param("T", format!("must be positive, got {t}")));
    }
    if !(tau_adi.is_finite() && tau_adi > 0.0) {
        return Err(Error::param(
            "tau_adi",
            format!("must be positive, got {tau_adi}"),
        ));
    }
    if !(tau_deph > 0.0) {
        return Err(Error::param(
            "tau_deph",
            format!("must be positive, got {tau_deph}"),
        ));
    }
    Ok((-tau_adi / t - t / tau_deph).exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimalPulse {
    /// `T′ = √(τ_adi τ_deph)`
    pub t_prime: f64,
    /// `η(T′) = exp(−2√(τ_adi/τ_deph))`
    pub eta_peak: f64,
}

pub fn optimal_pulse(tau_adi: f64, tau_deph: f64) -> Result<OptimalPulse> {
    if !(tau_adi.is_finite() && tau_adi > 0.0) {
        return Err(Error::param("tau_adi", "must be positive and finite"));
    }
    if !(tau_deph.is_finite() && tau_deph > 0.0) {
        return Err(Error::param("tau_deph", "must be positive and finite"));
    }
    Ok(OptimalPulse {
        t_prime: (tau_adi * tau_deph).sqrt(),
        eta_peak: (-2.0 * (tau_adi / tau_deph).sqrt()).exp(),
    })
}

/// `π² γ / Ω²` with both rates angular.
pub fn tau_adi_formula(gamma: f64, omega: f64) -> Result<f64> {
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(Error::param("gamma", "must be positive"));
    }
    if !(omega.is_finite() && omega > 0.0) {
        return Err(Error::param("omega", "must be positive"));
    }
    Ok(PI * PI * gamma / (omega * omega))
}

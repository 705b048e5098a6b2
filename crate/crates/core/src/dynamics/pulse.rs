use std::f64::consts::FRAC_PI_2;

use super::PassDirection;
use crate::error::{Error, Result};

/// Instantaneous pulse quantities at time `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseSample {
    pub t: f64,
    pub omega_p: f64,
    pub omega_s: f64,
    pub theta: f64,
    pub theta_dot: f64,
    pub omega_rms: f64,
}

/// cos² STIRAP envelopes: pump `Ω_P sin²(πt/2T)`, Stokes `Ω_S cos²(πt/2T)`.
pub fn pulse_envelopes(
    t: f64,
    duration: f64,
    omega_p_max: f64,
    omega_s_max: f64,
) -> Result<(f64, f64)> {
    let sample =
        PulseShape::new(duration, omega_p_max, omega_s_max, PassDirection::Forward).sample(t)?;
    Ok((sample.omega_p, sample.omega_s))
}

/// `atan2(Ω_P, Ω_S)`, which lies in [0, π/2] for non-negative Rabi frequencies.
pub fn mixing_angle(omega_p: f64, omega_s: f64) -> Result<f64> {
    if omega_p == 0.0 && omega_s == 0.0 {
        return Err(Error::MixingAngleUndefined);
    }
    Ok(omega_p.atan2(omega_s).clamp(0.0, FRAC_PI_2))
}

/// Closed-form `dθ/dt` for a forward pass.
pub fn theta_dot(t: f64, duration: f64, omega_p_max: f64, omega_s_max: f64) -> Result<f64> {
    let shape = PulseShape::new(duration, omega_p_max, omega_s_max, PassDirection::Forward);
    Ok(shape.sample(t)?.theta_dot)
}

fn check_time(t: f64, duration: f64) -> Result<()> {
    if !(duration > 0.0) {
        return Err(Error::param("pulse_duration", "must be positive"));
    }
    if !(0.0..=duration).contains(&t) {
        return Err(Error::TimeOutOfRange { t, duration });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseShape {
    pub duration: f64,
    pub omega_p_max: f64,
    pub omega_s_max: f64,
    pub direction: PassDirection,
}

impl PulseShape {
    pub fn new(
        duration: f64,
        omega_p_max: f64,
        omega_s_max: f64,
        direction: PassDirection,
    ) -> Self {
        Self {
            duration,
            omega_p_max,
            omega_s_max,
            direction,
        }
    }

    pub fn sample(&self, t: f64) -> Result<PulseSample> {
        check_time(t, self.duration)?;
        Ok(self.sample_unchecked(t))
    }

    /// Envelopes, mixing angle and its analytic derivative. `t` must lie in the pulse window.
    #[inline]
    pub fn sample_unchecked(&self, t: f64) -> PulseSample {
        let rate = FRAC_PI_2 / self.duration;
        // cos x taken as sin(π/2 − x) so both envelopes vanish exactly at their ends
        let s = (rate * t).sin();
        let c = (rate * (self.duration - t)).sin();
        let rising = s * s;
        let falling = c * c;
        // d/dt sin² = rate·sin(2x), d/dt cos² = −rate·sin(2x)
        let slope = rate * 2.0 * s * c;
        let (omega_p, omega_s, d_p, d_s) = match self.direction {
            PassDirection::Forward => (
                self.omega_p_max * rising,
                self.omega_s_max * falling,
                self.omega_p_max * slope,
                -self.omega_s_max * slope,
            ),
            PassDirection::Reverse => (
                self.omega_p_max * falling,
                self.omega_s_max * rising,
                -self.omega_p_max * slope,
                self.omega_s_max * slope,
            ),
        };
        let rms2 = omega_p * omega_p + omega_s * omega_s;
        let theta = omega_p.atan2(omega_s).clamp(0.0, FRAC_PI_2);
        let theta_dot = (d_p * omega_s - omega_p * d_s) / rms2;
        PulseSample {
            t,
            omega_p,
            omega_s,
            theta,
            theta_dot,
            omega_rms: rms2.sqrt(),
        }
    }
}

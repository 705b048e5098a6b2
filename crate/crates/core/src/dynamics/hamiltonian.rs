use nalgebra::Matrix3;
use num_complex::Complex64;

use super::PulseSample;

pub type Matrix3c = Matrix3<Complex64>;

/// Generator `M` of `i dc/dt = ½ M c` in the {B, E, D} basis.
///
/// `phi_dot_s`/`phi_dot_p` are the laser phase-noise derivatives, `delta` the
/// two-photon and `delta_cap` the one-photon detuning; all in rad/s.
#[inline]
pub fn hamiltonian_bd(
    sample: &PulseSample,
    phi_dot_s: f64,
    phi_dot_p: f64,
    delta: f64,
    delta_cap: f64,
    gamma: f64,
) -> Matrix3c {
    let (s, c) = sample.theta.sin_cos();
    let sin2 = 2.0 * s * c;
    let cos2 = c * c - s * s;
    let common = 2.0 * phi_dot_s * s * s + 2.0 * phi_dot_p * c * c;
    let drift = (phi_dot_s - phi_dot_p + delta) * sin2;
    let z = Complex64::new(0.0, 0.0);
    let re = |x: f64| Complex64::new(x, 0.0);
    Matrix3c::new(
        re(common + delta * cos2),
        re(sample.omega_rms),
        Complex64::new(-drift, 2.0 * sample.theta_dot),
        re(sample.omega_rms),
        Complex64::new(-2.0 * delta_cap, -gamma),
        z,
        Complex64::new(-drift, -2.0 * sample.theta_dot),
        z,
        re(common - delta * cos2),
    )
}

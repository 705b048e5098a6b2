use std::f64::consts::TAU;

use nalgebra::Vector3;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{hamiltonian_bd, Matrix3c, PassDirection, PulseShape, StirapParams};
use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::spectra::{DetuningSeries, PhaseTrajectory};

/// Amplitudes in the bright/excited/dark basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BrightDarkState {
    pub c_b: Complex64,
    pub c_e: Complex64,
    pub c_d: Complex64,
}

impl BrightDarkState {
    pub fn dark() -> Self {
        let z = Complex64::new(0.0, 0.0);
        Self {
            c_b: z,
            c_e: z,
            c_d: Complex64::new(1.0, 0.0),
        }
    }

    pub fn populations(&self) -> (f64, f64, f64) {
        (
            self.c_b.norm_sqr(),
            self.c_e.norm_sqr(),
            self.c_d.norm_sqr(),
        )
    }

    pub fn total_population(&self) -> f64 {
        let (b, e, d) = self.populations();
        b + e + d
    }

    fn as_vector(&self) -> Vector3<Complex64> {
        Vector3::new(self.c_b, self.c_e, self.c_d)
    }

    fn from_vector(v: &Vector3<Complex64>) -> Self {
        Self {
            c_b: v[0],
            c_e: v[1],
            c_d: v[2],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransferResult {
    /// Dark-state population at the end of the pass.
    pub efficiency: f64,
    pub final_populations: (f64, f64, f64),
    /// `1 − (P_B + P_E + P_D)`, population lost through the excited state.
    pub loss: f64,
}

impl TransferResult {
    fn from_state(state: &BrightDarkState) -> Self {
        let pops = state.populations();
        Self {
            efficiency: pops.2,
            final_populations: pops,
            loss: 1.0 - (pops.0 + pops.1 + pops.2),
        }
    }
}

/// Two- and one-photon detuning noise in rad/s on the integration grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DetuningTrace {
    pub grid: TimeGrid,
    pub two_photon: Vec<f64>,
    pub one_photon: Vec<f64>,
}

impl DetuningTrace {
    pub fn zeros(grid: TimeGrid) -> Self {
        Self {
            grid,
            two_photon: vec![0.0; grid.len],
            one_photon: vec![0.0; grid.len],
        }
    }

    /// Sums `series` (Hz) into the two-photon detuning and `one_photon_weight` times
    /// the same sum into the one-photon detuning.
    pub fn from_series(
        grid: TimeGrid,
        series: &[DetuningSeries],
        one_photon_weight: f64,
    ) -> Result<Self> {
        let mut two_photon = vec![0.0; grid.len];
        for s in series {
            if s.values.len() != grid.len {
                return Err(Error::GridMismatch(format!(
                    "detuning series has {} samples, grid has {}",
                    s.values.len(),
                    grid.len
                )));
            }
            for (acc, v) in two_photon.iter_mut().zip(&s.values) {
                *acc += TAU * v;
            }
        }
        let one_photon = two_photon.iter().map(|v| v * one_photon_weight).collect();
        Ok(Self {
            grid,
            two_photon,
            one_photon,
        })
    }
}

/// Largest step allowed for a pulse of `duration` with noise tones up to `max_tone_frequency`.
pub fn default_step(duration: f64, max_tone_frequency: f64) -> f64 {
    let adiabatic = duration / 2000.0;
    if max_tone_frequency > 0.0 {
        adiabatic.min(1.0 / (20.0 * max_tone_frequency))
    } else {
        adiabatic
    }
}

fn step_count(duration: f64, step: f64) -> usize {
    ((duration / step) * (1.0 - 1e-12)).ceil().max(1.0) as usize
}

/// Half-step grid (RK4 stages need the noise at `t`, `t + h/2` and `t + h`) for the
/// largest uniform step not exceeding `step` that divides `duration`.
pub fn integration_grid(duration: f64, step: f64) -> TimeGrid {
    let n = step_count(duration, step);
    TimeGrid::new(0.0, duration / n as f64 / 2.0, 2 * n + 1)
}

/// Forward (F→G) pass starting in the dark state.
pub fn propagate(
    params: &StirapParams,
    phase_s: &PhaseTrajectory,
    phase_p: &PhaseTrajectory,
    detuning: &DetuningTrace,
    step: f64,
) -> Result<TransferResult> {
    propagate_pass(
        params,
        PassDirection::Forward,
        phase_s,
        phase_p,
        detuning,
        step,
    )
}

pub fn propagate_pass(
    params: &StirapParams,
    direction: PassDirection,
    phase_s: &PhaseTrajectory,
    phase_p: &PhaseTrajectory,
    detuning: &DetuningTrace,
    step: f64,
) -> Result<TransferResult> {
    propagate_observed(
        params,
        direction,
        phase_s,
        phase_p,
        detuning,
        step,
        |_, _| {},
    )
}

/// Fixed-step RK4 integration of `i dc/dt = ½ M(t) c` over the pulse, calling
/// `observer(t, state)` after every step (and once at `t = 0`).
pub fn propagate_observed(
    params: &StirapParams,
    direction: PassDirection,
    phase_s: &PhaseTrajectory,
    phase_p: &PhaseTrajectory,
    detuning: &DetuningTrace,
    step: f64,
    mut observer: impl FnMut(f64, &BrightDarkState),
) -> Result<TransferResult> {
    params.validate()?;
    let duration = params.pulse_duration;
    let f_max = phase_s.max_tone_frequency.max(phase_p.max_tone_frequency);
    let limit = default_step(duration, f_max);
    if !(step > 0.0) || step > limit * (1.0 + 1e-9) {
        return Err(Error::StepTooLarge { step, limit });
    }

    let n_steps = step_count(duration, step);
    let h = duration / n_steps as f64;
    let grid = TimeGrid::new(0.0, h / 2.0, 2 * n_steps + 1);
    check_grid("Stokes phase", &phase_s.grid, &grid)?;
    check_grid("pump phase", &phase_p.grid, &grid)?;
    check_grid("detuning", &detuning.grid, &grid)?;

    let shape = PulseShape::new(duration, params.omega_p_max, params.omega_s_max, direction);
    let minus_half_i = Complex64::new(0.0, -0.5);
    let generator = |k: usize| -> Matrix3c {
        let sample = shape.sample_unchecked(grid.time(k).min(duration));
        hamiltonian_bd(
            &sample,
            phase_s.phi_dot[k],
            phase_p.phi_dot[k],
            params.delta_two_photon_static + detuning.two_photon[k],
            params.delta_one_photon + detuning.one_photon[k],
            params.gamma,
        ) * minus_half_i
    };

    let (half_h, full_h, sixth_h) = (
        Complex64::from(h / 2.0),
        Complex64::from(h),
        Complex64::from(h / 6.0),
    );
    let two = Complex64::from(2.0);
    let mut c = BrightDarkState::dark().as_vector();
    observer(0.0, &BrightDarkState::from_vector(&c));
    let mut a0 = generator(0);
    for n in 0..n_steps {
        let a_mid = generator(2 * n + 1);
        let a1 = generator(2 * n + 2);
        let k1 = a0 * c;
        let k2 = a_mid * (c + k1 * half_h);
        let k3 = a_mid * (c + k2 * half_h);
        let k4 = a1 * (c + k3 * full_h);
        c += (k1 + (k2 + k3) * two + k4) * sixth_h;
        if !c.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::Diverged {
                t: (n + 1) as f64 * h,
            });
        }
        observer((n + 1) as f64 * h, &BrightDarkState::from_vector(&c));
        a0 = a1;
    }
    Ok(TransferResult::from_state(&BrightDarkState::from_vector(
        &c,
    )))
}

fn check_grid(what: &str, have: &TimeGrid, want: &TimeGrid) -> Result<()> {
    let ok = have.start == 0.0
        && (have.step - want.step).abs() <= 1e-9 * want.step
        && have.len >= want.len;
    if ok {
        Ok(())
    } else {
        Err(Error::GridMismatch(format!(
            "{what} sampled with step {} s over {} points, integration needs step {} s over {} points",
            have.step, have.len, want.step, want.len
        )))
    }
}

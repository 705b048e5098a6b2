//! Three-level STIRAP dynamics in the bright/excited/dark basis.

mod hamiltonian;
mod multipass;
mod params;
mod propagate;
mod pulse;

pub use hamiltonian::{hamiltonian_bd, Matrix3c};
pub use multipass::{
    multi_pass, multi_pass_with_step, MultiPassResult, NoiseFactory, NoiseRealization, QuietNoise,
};
pub use params::{PassDirection, StirapParams};
pub use propagate::{
    default_step, integration_grid, propagate, propagate_observed, propagate_pass, BrightDarkState,
    DetuningTrace, TransferResult,
};
pub use pulse::{mixing_angle, pulse_envelopes, theta_dot, PulseSample, PulseShape};

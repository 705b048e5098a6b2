use serde::{Deserialize, Serialize};

use super::{
    default_step, integration_grid, propagate_pass, DetuningTrace, PassDirection, StirapParams,
    TransferResult,
};
use crate::error::Result;
use crate::grid::TimeGrid;
use crate::spectra::PhaseTrajectory;

/// One draw of every noise source for a single pass.
#[derive(Debug, Clone)]
pub struct NoiseRealization {
    pub phase_s: PhaseTrajectory,
    pub phase_p: PhaseTrajectory,
    pub detuning: DetuningTrace,
}

impl NoiseRealization {
    pub fn quiet(grid: TimeGrid) -> Self {
        Self {
            phase_s: PhaseTrajectory::zeros(grid),
            phase_p: PhaseTrajectory::zeros(grid),
            detuning: DetuningTrace::zeros(grid),
        }
    }
}

/// Produces independent noise for every (realization, pass).
pub trait NoiseFactory: Send + Sync {
    /// Highest phase-noise tone either laser can carry; bounds the integration step.
    fn max_tone_frequency(&self) -> f64;

    fn realize(&self, realization_seed: u64, pass: u32, grid: TimeGrid)
        -> Result<NoiseRealization>;
}

/// No noise at all.
#[derive(Debug, Clone, Copy, Default)]
pub struct QuietNoise;

impl NoiseFactory for QuietNoise {
    fn max_tone_frequency(&self) -> f64 {
        0.0
    }

    fn realize(
        &self,
        _realization_seed: u64,
        _pass: u32,
        grid: TimeGrid,
    ) -> Result<NoiseRealization> {
        Ok(NoiseRealization::quiet(grid))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiPassResult {
    /// Product of the per-pass efficiencies.
    pub recovery: f64,
    pub per_pass: Vec<TransferResult>,
}

impl MultiPassResult {
    pub fn efficiencies(&self) -> impl Iterator<Item = f64> + '_ {
        self.per_pass.iter().map(|r| r.efficiency)
    }
}

/// `params.n_passes` alternating forward/reverse transfers at the default step.
pub fn multi_pass(
    params: &StirapParams,
    noise: &dyn NoiseFactory,
    realization_seed: u64,
) -> Result<MultiPassResult> {
    let step = default_step(params.pulse_duration, noise.max_tone_frequency());
    multi_pass_with_step(params, noise, realization_seed, step)
}

pub fn multi_pass_with_step(
    params: &StirapParams,
    noise: &dyn NoiseFactory,
    realization_seed: u64,
    step: f64,
) -> Result<MultiPassResult> {
    params.validate()?;
    let grid = integration_grid(params.pulse_duration, step);
    let mut recovery = 1.0;
    let mut per_pass = Vec::with_capacity(params.n_passes as usize);
    for pass in 0..params.n_passes {
        let n = noise.realize(realization_seed, pass, grid)?;
        let r = propagate_pass(
            params,
            PassDirection::for_pass(pass),
            &n.phase_s,
            &n.phase_p,
            &n.detuning,
            step,
        )?;
        recovery *= r.efficiency;
        per_pass.push(r);
    }
    Ok(MultiPassResult { recovery, per_pass })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_pass_recovery_is_the_efficiency() {
        let params = StirapParams::experimental(5e-6, 1);
        let r = multi_pass(&params, &QuietNoise, 1).unwrap();
        assert_eq!(r.per_pass.len(), 1);
        assert_eq!(r.recovery, r.per_pass[0].efficiency);
    }

    #[test]
    fn recovery_is_product_of_passes() {
        let params = StirapParams::experimental(5e-6, 4);
        let r = multi_pass(&params, &QuietNoise, 1).unwrap();
        let product: f64 = r.efficiencies().product();
        assert_eq!(r.recovery, product);
    }
}

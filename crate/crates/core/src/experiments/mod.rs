//! Monte Carlo ensembles over noise realizations and the three sweeps built on them.

mod ensemble;
mod noise;
mod sweeps;

pub use ensemble::{with_workers, worker_count, EnsembleSpec, EnsembleStats, THREADS_ENV};
pub use noise::{LaserNoise, NoiseSources};
pub use sweeps::{
    ensemble_recoveries, ensemble_stats, optimize_duration, run_duration_sweep, run_npass_series,
    run_rabi_landscape, DurationSearch, SweepResult, SweepRow,
};

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::NoiseFactory;
use crate::error::{Error, Result};
use crate::rng::realization_seed;

/// Caps the number of worker threads when set.
pub const THREADS_ENV: &str = "STIRAP_SIM_THREADS";

#[derive(Clone)]
pub struct EnsembleSpec {
    pub n_realizations: usize,
    pub master_seed: u64,
    pub noise: Arc<dyn NoiseFactory>,
}

impl std::fmt::Debug for EnsembleSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("EnsembleSpec")
            .field("n_realizations", &self.n_realizations)
            .field("master_seed", &self.master_seed)
            .finish_non_exhaustive()
    }
}

impl EnsembleSpec {
    pub fn new(
        n_realizations: usize,
        master_seed: u64,
        noise: impl NoiseFactory + 'static,
    ) -> Self {
        Self {
            n_realizations,
            master_seed,
            noise: Arc::new(noise),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_realizations == 0 {
            return Err(Error::param("n_realizations", "must be >= 1"));
        }
        Ok(())
    }

    pub fn seed(&self, realization: usize) -> u64 {
        realization_seed(self.master_seed, realization as u64)
    }
}

/// Mean and standard error of an ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleStats {
    pub mean: f64,
    /// Sample standard deviation over `√n`.
    pub std_error: f64,
    pub n: usize,
}

// Neumaier compensated sum
fn compensated_sum(values: impl Iterator<Item = f64>) -> f64 {
    let (mut sum, mut c) = (0.0f64, 0.0f64);
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            c += (sum - t) + v;
        } else {
            c += (v - t) + sum;
        }
        sum = t;
    }
    sum + c
}

impl EnsembleStats {
    pub fn from_samples(samples: &[f64]) -> Self {
        let n = samples.len();
        if n == 0 {
            return Self {
                mean: f64::NAN,
                std_error: f64::NAN,
                n,
            };
        }
        let mean = compensated_sum(samples.iter().copied()) / n as f64;
        let std_error = if n > 1 {
            let var = compensated_sum(samples.iter().map(|x| (x - mean).powi(2))) / (n - 1) as f64;
            (var / n as f64).sqrt()
        } else {
            0.0
        };
        Self { mean, std_error, n }
    }
}

/// Worker count from `STIRAP_SIM_THREADS`, or every available core.
pub fn worker_count() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

/// Runs `job` on a dedicated pool of `threads` workers (default: [`worker_count`]).
pub fn with_workers<R: Send>(threads: Option<usize>, job: impl FnOnce() -> R + Send) -> R {
    let n = threads.unwrap_or_else(worker_count).max(1);
    match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
        Ok(pool) => pool.install(job),
        Err(_) => job(),
    }
}

/// `f(0..n)` evaluated in parallel, results in index order.
pub(crate) fn par_map<T: Send>(
    n: usize,
    f: impl Fn(usize) -> Result<T> + Sync + Send,
) -> Result<Vec<T>> {
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stats_of_known_samples() {
        let s = EnsembleStats::from_samples(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(s.mean, 2.5);
        let sd = (5.0f64 / 3.0).sqrt();
        assert!((s.std_error - sd / 2.0).abs() < 1e-15);
        assert_eq!(EnsembleStats::from_samples(&[0.7]).std_error, 0.0);
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let v = [1e16, 1.0, -1e16, 1.0];
        assert_eq!(compensated_sum(v.into_iter()), 2.0);
    }

    #[test]
    fn par_map_keeps_order() {
        let v = with_workers(Some(3), || par_map(100, |i| Ok(i * i))).unwrap();
        assert!(v.iter().enumerate().all(|(i, &x)| x == i * i));
    }
}

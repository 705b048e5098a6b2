use serde::{Deserialize, Serialize};

use super::ensemble::{par_map, EnsembleSpec, EnsembleStats};
use crate::dynamics::{multi_pass, StirapParams};
use crate::error::{Error, Result};

/// One row of a sweep: the axis value and the ensemble statistics measured there.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub axis: f64,
    /// Mean efficiency or recovery.
    pub mean: f64,
    pub std_error: f64,
    /// Pulse duration used for this row (s).
    pub pulse_duration: f64,
    pub n_realizations: usize,
    pub master_seed: u64,
    /// Set when the optimizing duration sits on the edge of the search window.
    pub at_boundary: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    /// What `axis` holds, e.g. `pulse_duration_s`.
    pub axis_name: String,
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    pub fn axis(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.axis).collect()
    }

    pub fn means(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.mean).collect()
    }
}

fn row(axis: f64, stats: EnsembleStats, pulse_duration: f64, ensemble: &EnsembleSpec) -> SweepRow {
    SweepRow {
        axis,
        mean: stats.mean,
        std_error: stats.std_error,
        pulse_duration,
        n_realizations: stats.n,
        master_seed: ensemble.master_seed,
        at_boundary: false,
    }
}

/// Multi-pass recovery of every realization at one parameter point.
pub fn ensemble_recoveries(params: &StirapParams, ensemble: &EnsembleSpec) -> Result<Vec<f64>> {
    ensemble.validate()?;
    par_map(ensemble.n_realizations, |k| {
        Ok(multi_pass(params, ensemble.noise.as_ref(), ensemble.seed(k))?.recovery)
    })
}

pub fn ensemble_stats(params: &StirapParams, ensemble: &EnsembleSpec) -> Result<EnsembleStats> {
    Ok(EnsembleStats::from_samples(&ensemble_recoveries(
        params, ensemble,
    )?))
}

/// Mean `params.n_passes`-pass recovery at each pulse duration.
///
/// Realization `k` sees the same noise seed at every duration.
pub fn run_duration_sweep(
    durations: &[f64],
    params: &StirapParams,
    ensemble: &EnsembleSpec,
) -> Result<SweepResult> {
    ensemble.validate()?;
    params.validate()?;
    if durations.is_empty() {
        return Err(Error::param("durations", "no durations given"));
    }
    if durations.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
        return Err(Error::param("durations", "must be positive"));
    }
    if durations.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::param("durations", "must be strictly increasing"));
    }
    let n = ensemble.n_realizations;
    let values = par_map(durations.len() * n, |job| {
        let (i, k) = (job / n, job % n);
        let p = params.with_duration(durations[i]);
        Ok(multi_pass(&p, ensemble.noise.as_ref(), ensemble.seed(k))?.recovery)
    })?;
    let rows = durations
        .iter()
        .zip(values.chunks(n))
        .map(|(&t, chunk)| row(t, EnsembleStats::from_samples(chunk), t, ensemble))
        .collect();
    Ok(SweepResult {
        axis_name: "pulse_duration_s".into(),
        rows,
    })
}

/// Mean recovery after each even number of passes.
///
/// Every realization runs the largest pass count once and each row reads off
/// the running product at its N, so rows share noise.
pub fn run_npass_series(
    pass_counts: &[u32],
    params: &StirapParams,
    ensemble: &EnsembleSpec,
) -> Result<SweepResult> {
    ensemble.validate()?;
    if pass_counts.is_empty() {
        return Err(Error::param("pass_counts", "no pass counts given"));
    }
    if let Some(&odd) = pass_counts.iter().find(|&&n| n % 2 == 1) {
        return Err(Error::OddPassCount(odd));
    }
    let max_n = pass_counts.iter().copied().max().unwrap_or(0);
    let per_realization: Vec<Vec<f64>> = if max_n == 0 {
        vec![Vec::new(); ensemble.n_realizations]
    } else {
        let p = StirapParams {
            n_passes: max_n,
            ..params.clone()
        };
        p.validate()?;
        par_map(ensemble.n_realizations, |k| {
            let r = multi_pass(&p, ensemble.noise.as_ref(), ensemble.seed(k))?;
            let mut running = 1.0;
            Ok(r.efficiencies()
                .map(|e| {
                    running *= e;
                    running
                })
                .collect())
        })?
    };
    let rows = pass_counts
        .iter()
        .map(|&n| {
            let samples: Vec<f64> = per_realization
                .iter()
                .map(|prefix| if n == 0 { 1.0 } else { prefix[n as usize - 1] })
                .collect();
            row(
                f64::from(n),
                EnsembleStats::from_samples(&samples),
                params.pulse_duration,
                ensemble,
            )
        })
        .collect();
    Ok(SweepResult {
        axis_name: "n_passes".into(),
        rows,
    })
}

/// Pulse-duration search window for the Rabi landscape.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DurationSearch {
    pub t_min: f64,
    pub t_max: f64,
    /// Log-spaced grid points over `[t_min, t_max]`.
    pub n_grid: usize,
    /// Relative width at which golden-section refinement stops.
    pub tolerance: f64,
}

impl Default for DurationSearch {
    /// 25 points per decade over [1 µs, 1 ms], refined to 0.5 %.
    fn default() -> Self {
        Self {
            t_min: 1e-6,
            t_max: 1e-3,
            n_grid: 76,
            tolerance: 0.005,
        }
    }
}

impl DurationSearch {
    pub fn validate(&self) -> Result<()> {
        if !(self.t_min > 0.0 && self.t_max > self.t_min && self.t_max.is_finite()) {
            return Err(Error::param("t_search", "need 0 < t_min < t_max"));
        }
        if self.n_grid < 3 {
            return Err(Error::param(
                "t_search_points",
                "need at least 3 grid points",
            ));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::param("t_search_tolerance", "must be positive"));
        }
        Ok(())
    }

    pub fn grid(&self) -> Vec<f64> {
        let (a, b) = (self.t_min.ln(), self.t_max.ln());
        (0..self.n_grid)
            .map(|i| (a + (b - a) * i as f64 / (self.n_grid - 1) as f64).exp())
            .collect()
    }
}

/// Best single-pass duration for one parameter set: grid search in log T,
/// then golden-section refinement inside the bracketing grid cells.
pub fn optimize_duration(
    params: &StirapParams,
    ensemble: &EnsembleSpec,
    search: &DurationSearch,
) -> Result<(f64, EnsembleStats, bool)> {
    search.validate()?;
    let single = StirapParams {
        n_passes: 1,
        ..params.clone()
    };
    let eval = |t: f64| ensemble_stats(&single.with_duration(t), ensemble);

    let grid = search.grid();
    let mut best: Option<(f64, EnsembleStats)> = None;
    let mut best_i = 0;
    for (i, &t) in grid.iter().enumerate() {
        let s = eval(t)?;
        if best.as_ref().is_none_or(|(_, b)| s.mean > b.mean) {
            best = Some((t, s));
            best_i = i;
        }
    }
    let at_boundary = best_i == 0 || best_i == grid.len() - 1;
    let (mut t_best, mut s_best) = best.expect("grid has points");

    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut a = grid[best_i.saturating_sub(1)].ln();
    let mut b = grid[(best_i + 1).min(grid.len() - 1)].ln();
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let mut f1 = eval(x1.exp())?;
    let mut f2 = eval(x2.exp())?;
    while b - a > (1.0 + search.tolerance).ln() {
        if f1.mean >= f2.mean {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = eval(x1.exp())?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = eval(x2.exp())?;
        }
    }
    for (x, f) in [(x1, f1), (x2, f2)] {
        if f.mean > s_best.mean {
            t_best = x.exp();
            s_best = f;
        }
    }
    Ok((t_best, s_best, at_boundary))
}

/// Lowest single-pass error `1 − η` at each average peak Rabi frequency (rad/s),
/// keeping the template's pump/Stokes ratio and optimizing T per point.
pub fn run_rabi_landscape(
    omega_bars: &[f64],
    template: &StirapParams,
    ensemble: &EnsembleSpec,
    search: &DurationSearch,
) -> Result<SweepResult> {
    ensemble.validate()?;
    template.validate()?;
    if omega_bars.is_empty() || omega_bars.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
        return Err(Error::param(
            "omega_bar",
            "need at least one positive value",
        ));
    }
    let mut rows = Vec::with_capacity(omega_bars.len());
    for &w in omega_bars {
        let params = template.with_omega_bar(w);
        let (t, stats, at_boundary) = optimize_duration(&params, ensemble, search)?;
        if at_boundary {
            log::warn!(
                "optimal duration at Ω̄/2π = {:.0} Hz lies on the search boundary ({t:e} s)",
                w / std::f64::consts::TAU
            );
        }
        let mut r = row(w, stats, t, ensemble);
        r.at_boundary = at_boundary;
        rows.push(r);
    }
    Ok(SweepResult {
        axis_name: "omega_bar_rad_s".into(),
        rows,
    })
}

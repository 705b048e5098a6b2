use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::least_squares::{curve_fit, CurveModel};
use crate::error::{Error, Result};

/// One measured point `y(x) ± sigma`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DataPoint {
    pub x: f64,
    pub y: f64,
    pub sigma: f64,
}

impl DataPoint {
    pub fn new(x: f64, y: f64, sigma: f64) -> Self {
        Self { x, y, sigma }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EfficiencyModelFit {
    pub tau_adi: f64,
    pub tau_deph: f64,
    pub amplitude: f64,
    pub n_passes_used: u32,
    /// Covariance of `(tau_adi, tau_deph, amplitude)`; the amplitude row is zero when it was pinned to 1.
    pub covariance: DMatrix<f64>,
    pub amplitude_fixed: bool,
    pub cost: f64,
}

impl EfficiencyModelFit {
    pub fn sigma(&self, i: usize) -> f64 {
        self.covariance[(i, i)].max(0.0).sqrt()
    }
}

// recovery(T) = A·exp(−N(τa/T + T/τd)) over (ln τa, ln τd[, ln A])
struct EtaCurve {
    n: f64,
    fixed_amplitude: Option<f64>,
}

impl CurveModel for EtaCurve {
    fn n_params(&self) -> usize {
        if self.fixed_amplitude.is_some() {
            2
        } else {
            3
        }
    }

    fn eval(&self, t: f64, p: &[f64], grad: &mut [f64]) -> f64 {
        let (ta, td) = (p[0].exp(), p[1].exp());
        let ln_a = self.fixed_amplitude.map_or_else(|| p[2], f64::ln);
        let y = (ln_a - self.n * (ta / t + t / td)).exp();
        grad[0] = -y * self.n * ta / t;
        grad[1] = y * self.n * t / td;
        if self.fixed_amplitude.is_none() {
            grad[2] = y;
        }
        y
    }
}

fn weighted_line(xs: &[f64], ys: &[f64], ws: &[f64]) -> Option<(f64, f64, [[f64; 2]; 2])> {
    let (mut s, mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for ((&x, &y), &w) in xs.iter().zip(ys).zip(ws) {
        s += w;
        sx += w * x;
        sy += w * y;
        sxx += w * x * x;
        sxy += w * x * y;
    }
    let det = s * sxx - sx * sx;
    if !(det.abs() > 0.0) || !det.is_finite() {
        return None;
    }
    let slope = (s * sxy - sx * sy) / det;
    let intercept = (sxx * sy - sx * sxy) / det;
    Some((
        slope,
        intercept,
        [[s / det, -sx / det], [-sx / det, sxx / det]],
    ))
}

fn check_points(points: &[DataPoint], min: usize, what: &str) -> Result<()> {
    if points.len() < min {
        return Err(Error::DegenerateData(format!(
            "{what} needs at least {min} points, got {}",
            points.len()
        )));
    }
    for p in points {
        if !(p.x.is_finite() && p.y.is_finite()) {
            return Err(Error::DegenerateData(format!(
                "non-finite point ({}, {})",
                p.x, p.y
            )));
        }
        if !(p.sigma.is_finite() && p.sigma > 0.0) {
            return Err(Error::param(
                "sigma",
                format!("must be positive, got {}", p.sigma),
            ));
        }
    }
    Ok(())
}

/// Fits `recovery(T) = A·η(T)^N` to a duration sweep of `n_passes`-pass recoveries.
///
/// Seeds come from the data maximum: near `T′` the log recovery is
/// `ln A − 2N√(τa/τd)·cosh(ln T − ln T′)`, a straight line in the cosh.
/// If the free amplitude comes out above 1 the fit is repeated with `A = 1`.
pub fn fit_eta_curve(points: &[DataPoint], n_passes: u32) -> Result<EfficiencyModelFit> {
    check_points(points, 4, "eta fit")?;
    if n_passes == 0 {
        return Err(Error::param("n_passes", "must be >= 1"));
    }
    if points.iter().any(|p| !(p.x > 0.0 && p.y > 0.0)) {
        return Err(Error::DegenerateData(
            "durations and recoveries must be positive".into(),
        ));
    }
    if points.iter().all(|p| p.x == points[0].x) {
        return Err(Error::DegenerateData("all durations are equal".into()));
    }
    let n = f64::from(n_passes);
    let xs: Vec<f64> = points.iter().map(|p| p.x).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.y).collect();
    let sigmas: Vec<f64> = points.iter().map(|p| p.sigma).collect();

    let best = points
        .iter()
        .max_by(|a, b| a.y.total_cmp(&b.y))
        .expect("non-empty");
    let ln_t_peak = best.x.ln();
    let u: Vec<f64> = xs.iter().map(|t| (t.ln() - ln_t_peak).cosh()).collect();
    let ln_y: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let w: Vec<f64> = points.iter().map(|p| (p.y / p.sigma).powi(2)).collect();
    let (ratio, ln_a) = match weighted_line(&u, &ln_y, &w) {
        Some((slope, intercept, _)) if slope < 0.0 => {
            ((slope / (2.0 * n)).powi(2), intercept.min(0.0))
        }
        _ => (1e-4, best.y.ln().min(0.0)),
    };
    let ln_ta = ln_t_peak + 0.5 * ratio.ln();
    let ln_td = ln_t_peak - 0.5 * ratio.ln();

    let free = EtaCurve {
        n,
        fixed_amplitude: None,
    };
    let fit = curve_fit(&free, &xs, &ys, &sigmas, &[ln_ta, ln_td, ln_a])?;
    if fit.params[2] <= 0.0 {
        let values = [
            fit.params[0].exp(),
            fit.params[1].exp(),
            fit.params[2].exp(),
        ];
        let covariance =
            DMatrix::from_fn(3, 3, |i, j| fit.covariance[(i, j)] * values[i] * values[j]);
        return Ok(EfficiencyModelFit {
            tau_adi: values[0],
            tau_deph: values[1],
            amplitude: values[2],
            n_passes_used: n_passes,
            covariance,
            amplitude_fixed: false,
            cost: fit.cost,
        });
    }

    let pinned = EtaCurve {
        n,
        fixed_amplitude: Some(1.0),
    };
    let fit = curve_fit(&pinned, &xs, &ys, &sigmas, &fit.params[..2])?;
    let values = [fit.params[0].exp(), fit.params[1].exp()];
    let covariance = DMatrix::from_fn(3, 3, |i, j| {
        if i < 2 && j < 2 {
            fit.covariance[(i, j)] * values[i] * values[j]
        } else {
            0.0
        }
    });
    Ok(EfficiencyModelFit {
        tau_adi: values[0],
        tau_deph: values[1],
        amplitude: 1.0,
        n_passes_used: n_passes,
        covariance,
        amplitude_fixed: true,
        cost: fit.cost,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogLinearFit {
    /// Per-pass efficiency `exp(slope)`.
    pub eta: f64,
    pub eta_sigma: f64,
    /// Recovery extrapolated to zero passes, `exp(intercept)`.
    pub p0: f64,
    pub slope: f64,
    pub intercept: f64,
    /// Covariance of `(slope, intercept)`.
    pub covariance: [[f64; 2]; 2],
}

/// Weighted straight-line fit of `ln(recovery)` against the pass count.
pub fn fit_loglinear(points: &[DataPoint]) -> Result<LogLinearFit> {
    check_points(points, 3, "log-linear fit")?;
    if let Some(p) = points.iter().find(|p| p.y <= 0.0) {
        return Err(Error::param(
            "recovery",
            format!("must be positive, got {} at N = {}", p.y, p.x),
        ));
    }
    let mut distinct: Vec<f64> = points.iter().map(|p| p.x).collect();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() < 3 {
        return Err(Error::DegenerateData(
            "need at least 3 distinct N values".into(),
        ));
    }
    let xs: Vec<f64> = points.iter().map(|p| p.x).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.y.ln()).collect();
    // σ(ln y) = σ/y
    let ws: Vec<f64> = points.iter().map(|p| (p.y / p.sigma).powi(2)).collect();
    let (slope, intercept, covariance) = weighted_line(&xs, &ys, &ws)
        .ok_or_else(|| Error::DegenerateData("singular normal equations".into()))?;
    let eta = slope.exp();
    Ok(LogLinearFit {
        eta,
        eta_sigma: eta * covariance[0][0].sqrt(),
        p0: intercept.exp(),
        slope,
        intercept,
        covariance,
    })
}

/// `(1 − η_off) / (1 − η_on)`, the factor by which the per-pass error shrinks.
pub fn error_ratio(eta_off: f64, eta_on: f64) -> Result<f64> {
    if !(eta_on < 1.0) {
        return Err(Error::param("eta_on", "must be below 1"));
    }
    Ok((1.0 - eta_off) / (1.0 - eta_on))
}

#[derive(Debug, Clone, PartialEq)]
pub struct RabiFlopFit {
    /// Angular oscillation frequency (rad/s).
    pub omega: f64,
    pub omega_sigma: f64,
    pub decay_time: f64,
    pub amplitude: f64,
    pub offset: f64,
    /// Covariance of `(offset, amplitude, ln decay_time, omega)`.
    pub covariance: DMatrix<f64>,
    pub cost: f64,
}

// offset + amplitude·exp(−τ/decay)·cos(ωτ) over (offset, amplitude, ln decay, ω)
struct DecayingCosine;

impl CurveModel for DecayingCosine {
    fn n_params(&self) -> usize {
        4
    }

    fn eval(&self, tau: f64, p: &[f64], grad: &mut [f64]) -> f64 {
        let decay = p[2].exp();
        let env = (-tau / decay).exp();
        let (s, c) = (p[3] * tau).sin_cos();
        grad[0] = 1.0;
        grad[1] = env * c;
        grad[2] = p[1] * env * c * tau / decay;
        grad[3] = -p[1] * env * tau * s;
        p[0] + p[1] * env * c
    }
}

fn strongest_frequency(xs: &[f64], ys: &[f64], mean: f64) -> f64 {
    let span =
        xs.iter().cloned().fold(f64::MIN, f64::max) - xs.iter().cloned().fold(f64::MAX, f64::min);
    let mut gaps: Vec<f64> = xs
        .windows(2)
        .map(|w| (w[1] - w[0]).abs())
        .filter(|d| *d > 0.0)
        .collect();
    gaps.sort_by(f64::total_cmp);
    let dt = gaps.get(gaps.len() / 2).copied().unwrap_or(span);
    let (w_min, w_max) = (PI / span, PI / dt);
    let dw = PI / (8.0 * span);
    let steps = ((w_max - w_min) / dw).ceil() as usize;
    let mut best = (w_min, f64::MIN);
    for k in 0..=steps {
        let w = w_min + k as f64 * dw;
        let (mut re, mut im) = (0.0, 0.0);
        for (&x, &y) in xs.iter().zip(ys) {
            let (s, c) = (w * x).sin_cos();
            re += (y - mean) * c;
            im += (y - mean) * s;
        }
        let power = re * re + im * im;
        if power > best.1 {
            best = (w, power);
        }
    }
    best.0
}

/// Fits `offset + amplitude·exp(−τ/decay)·cos(ωτ)`, seeding ω from the periodogram peak.
pub fn fit_rabi_flop(points: &[DataPoint]) -> Result<RabiFlopFit> {
    check_points(points, 8, "Rabi fit")?;
    let mut sorted = points.to_vec();
    sorted.sort_by(|a, b| a.x.total_cmp(&b.x));
    let xs: Vec<f64> = sorted.iter().map(|p| p.x).collect();
    let ys: Vec<f64> = sorted.iter().map(|p| p.y).collect();
    let sigmas: Vec<f64> = sorted.iter().map(|p| p.sigma).collect();
    let span = xs[xs.len() - 1] - xs[0];
    if !(span > 0.0) {
        return Err(Error::DegenerateData("all delays are equal".into()));
    }

    let mean = ys.iter().sum::<f64>() / ys.len() as f64;
    let spread = (ys.iter().map(|y| (y - mean).powi(2)).sum::<f64>() / ys.len() as f64).sqrt();
    if spread <= 1e-12 * mean.abs().max(1.0) {
        return Err(Error::DegenerateData(
            "zero oscillation amplitude, omega is unidentifiable".into(),
        ));
    }

    let w0 = strongest_frequency(&xs, &ys, mean);
    // cosine/sine projection at the seed frequency fixes the sign of the amplitude
    let (mut cc, mut cs) = (0.0, 0.0);
    for (&x, &y) in xs.iter().zip(&ys) {
        let (s, c) = (w0 * x).sin_cos();
        cc += (y - mean) * c;
        cs += (y - mean) * s;
    }
    let a0 = if cc.abs() >= cs.abs() {
        2.0 * cc / xs.len() as f64
    } else {
        (2.0 * (cc * cc + cs * cs).sqrt() / xs.len() as f64).copysign(cc)
    };
    let fit = curve_fit(
        &DecayingCosine,
        &xs,
        &ys,
        &sigmas,
        &[mean, a0, span.ln(), w0],
    )?;
    Ok(RabiFlopFit {
        omega: fit.params[3].abs(),
        omega_sigma: fit.sigma(3),
        decay_time: fit.params[2].exp(),
        amplitude: fit.params[1],
        offset: fit.params[0],
        covariance: fit.covariance,
        cost: fit.cost,
    })
}

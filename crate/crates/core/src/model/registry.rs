use std::collections::BTreeMap;
use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use super::fits::{fit_eta_curve, fit_loglinear, fit_rabi_flop, DataPoint};
use super::optimal_pulse;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitParameter {
    pub name: String,
    pub value: f64,
    pub sigma: f64,
    pub unit: String,
}

impl FitParameter {
    fn new(name: &str, value: f64, sigma: f64, unit: &str) -> Self {
        Self {
            name: name.into(),
            value,
            sigma,
            unit: unit.into(),
        }
    }
}

/// Uniform summary of any fit, for tables and the command line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub kind: String,
    pub parameters: Vec<FitParameter>,
    pub cost: f64,
    pub notes: Vec<String>,
}

impl FitReport {
    pub fn get(&self, name: &str) -> Option<&FitParameter> {
        self.parameters.iter().find(|p| p.name == name)
    }
}

/// A named curve fit over `(x, y, sigma)` rows.
pub trait Fitter: Send + Sync {
    fn name(&self) -> &'static str;

    /// What the x and y columns must hold.
    fn columns(&self) -> &'static str;

    fn fit(&self, points: &[DataPoint]) -> Result<FitReport>;
}

/// Duration sweep of N-pass recoveries, x = T in seconds.
pub struct EtaFitter {
    pub n_passes: u32,
}

impl Fitter for EtaFitter {
    fn name(&self) -> &'static str {
        "eta"
    }

    fn columns(&self) -> &'static str {
        "x = pulse duration T (s), y = recovery after n_passes"
    }

    fn fit(&self, points: &[DataPoint]) -> Result<FitReport> {
        let fit = fit_eta_curve(points, self.n_passes)?;
        let opt = optimal_pulse(fit.tau_adi, fit.tau_deph)?;
        let mut notes = vec![format!("n_passes = {}", self.n_passes)];
        if fit.amplitude_fixed {
            notes.push("free amplitude exceeded 1, refitted with amplitude = 1".into());
        }
        Ok(FitReport {
            kind: self.name().into(),
            parameters: vec![
                FitParameter::new("tau_adi", fit.tau_adi, fit.sigma(0), "s"),
                FitParameter::new("tau_deph", fit.tau_deph, fit.sigma(1), "s"),
                FitParameter::new("amplitude", fit.amplitude, fit.sigma(2), ""),
                FitParameter::new("t_prime", opt.t_prime, f64::NAN, "s"),
                FitParameter::new("eta_peak", opt.eta_peak, f64::NAN, ""),
            ],
            cost: fit.cost,
            notes,
        })
    }
}

/// Recovery against pass count, x = N.
pub struct LogLinearFitter;

impl Fitter for LogLinearFitter {
    fn name(&self) -> &'static str {
        "loglinear"
    }

    fn columns(&self) -> &'static str {
        "x = number of passes N, y = recovery"
    }

    fn fit(&self, points: &[DataPoint]) -> Result<FitReport> {
        let fit = fit_loglinear(points)?;
        Ok(FitReport {
            kind: self.name().into(),
            parameters: vec![
                FitParameter::new("eta", fit.eta, fit.eta_sigma, ""),
                FitParameter::new("p0", fit.p0, fit.p0 * fit.covariance[1][1].sqrt(), ""),
            ],
            cost: f64::NAN,
            notes: Vec::new(),
        })
    }
}

/// Rabi flopping trace, x = pulse length in seconds.
pub struct RabiFitter;

impl Fitter for RabiFitter {
    fn name(&self) -> &'static str {
        "rabi"
    }

    fn columns(&self) -> &'static str {
        "x = pulse length (s), y = population"
    }

    fn fit(&self, points: &[DataPoint]) -> Result<FitReport> {
        let fit = fit_rabi_flop(points)?;
        Ok(FitReport {
            kind: self.name().into(),
            parameters: vec![
                FitParameter::new("frequency", fit.omega / TAU, fit.omega_sigma / TAU, "Hz"),
                FitParameter::new(
                    "decay_time",
                    fit.decay_time,
                    fit.decay_time * fit.covariance[(2, 2)].max(0.0).sqrt(),
                    "s",
                ),
                FitParameter::new(
                    "amplitude",
                    fit.amplitude,
                    fit.covariance[(1, 1)].max(0.0).sqrt(),
                    "",
                ),
                FitParameter::new(
                    "offset",
                    fit.offset,
                    fit.covariance[(0, 0)].max(0.0).sqrt(),
                    "",
                ),
            ],
            cost: fit.cost,
            notes: Vec::new(),
        })
    }
}

/// Fit kinds selectable by name.
pub struct FitterRegistry {
    fitters: BTreeMap<&'static str, Box<dyn Fitter>>,
}

impl FitterRegistry {
    pub fn empty() -> Self {
        Self {
            fitters: BTreeMap::new(),
        }
    }

    /// `eta` (with `n_passes`), `loglinear` and `rabi`.
    pub fn builtin(n_passes: u32) -> Self {
        let mut r = Self::empty();
        r.register(Box::new(EtaFitter { n_passes }));
        r.register(Box::new(LogLinearFitter));
        r.register(Box::new(RabiFitter));
        r
    }

    pub fn register(&mut self, fitter: Box<dyn Fitter>) {
        self.fitters.insert(fitter.name(), fitter);
    }

    pub fn get(&self, name: &str) -> Result<&dyn Fitter> {
        self.fitters
            .get(name)
            .map(|f| f.as_ref())
            .ok_or_else(|| Error::UnknownStrategy {
                kind: "fit kind",
                name: name.into(),
                available: self.names().join(", "),
            })
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.fitters.keys().copied().collect()
    }
}

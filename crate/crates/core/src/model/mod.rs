//! The two-timescale efficiency model and the curve fits used to analyse sweeps.

mod efficiency;
mod fits;
mod least_squares;
mod registry;

pub use efficiency::{eta_model, optimal_pulse, tau_adi_formula, OptimalPulse};
pub use fits::{
    error_ratio, fit_eta_curve, fit_loglinear, fit_rabi_flop, DataPoint, EfficiencyModelFit,
    LogLinearFit, RabiFlopFit,
};
pub use least_squares::{curve_fit, CurveFit, CurveModel, MAX_ITERATIONS, RELATIVE_COST_TOLERANCE};
pub use registry::{
    EtaFitter, FitParameter, FitReport, Fitter, FitterRegistry, LogLinearFitter, RabiFitter,
};

use levenberg_marquardt::{LeastSquaresProblem, LevenbergMarquardt, TerminationReason};
use nalgebra::storage::Owned;
use nalgebra::{DMatrix, DVector, Dyn};

use crate::error::{Error, Result};

pub const RELATIVE_COST_TOLERANCE: f64 = 1e-10;
pub const MAX_ITERATIONS: usize = 200;

/// A scalar model `y(x; p)` with its gradient in `p`.
pub trait CurveModel {
    fn n_params(&self) -> usize;

    /// Writes `∂y/∂p` into `grad` and returns `y`.
    fn eval(&self, x: f64, p: &[f64], grad: &mut [f64]) -> f64;
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurveFit {
    pub params: Vec<f64>,
    /// `(JᵀJ)⁻¹` of the weighted residuals at the solution.
    pub covariance: DMatrix<f64>,
    /// `½ Σ rᵢ²`
    pub cost: f64,
    pub evaluations: usize,
}

impl CurveFit {
    pub fn sigma(&self, i: usize) -> f64 {
        self.covariance[(i, i)].max(0.0).sqrt()
    }
}

struct Problem<'a, M: CurveModel> {
    model: &'a M,
    xs: &'a [f64],
    ys: &'a [f64],
    sigmas: &'a [f64],
    p: DVector<f64>,
}

impl<M: CurveModel> Problem<'_, M> {
    fn weighted(&self) -> (DVector<f64>, DMatrix<f64>) {
        let n = self.p.len();
        let mut r = DVector::zeros(self.xs.len());
        let mut j = DMatrix::zeros(self.xs.len(), n);
        let mut grad = vec![0.0; n];
        for i in 0..self.xs.len() {
            let y = self.model.eval(self.xs[i], self.p.as_slice(), &mut grad);
            r[i] = (y - self.ys[i]) / self.sigmas[i];
            for k in 0..n {
                j[(i, k)] = grad[k] / self.sigmas[i];
            }
        }
        (r, j)
    }
}

impl<M: CurveModel> LeastSquaresProblem<f64, Dyn, Dyn> for Problem<'_, M> {
    type ResidualStorage = Owned<f64, Dyn>;
    type JacobianStorage = Owned<f64, Dyn, Dyn>;
    type ParameterStorage = Owned<f64, Dyn>;

    fn set_params(&mut self, x: &DVector<f64>) {
        self.p.copy_from(x);
    }

    fn params(&self) -> DVector<f64> {
        self.p.clone()
    }

    fn residuals(&self) -> Option<DVector<f64>> {
        let (r, _) = self.weighted();
        r.iter().all(|v| v.is_finite()).then_some(r)
    }

    fn jacobian(&self) -> Option<DMatrix<f64>> {
        let (_, j) = self.weighted();
        j.iter().all(|v| v.is_finite()).then_some(j)
    }
}

/// Weighted damped least squares of `model` against `(xs, ys ± sigmas)` from `initial`.
pub fn curve_fit<M: CurveModel>(
    model: &M,
    xs: &[f64],
    ys: &[f64],
    sigmas: &[f64],
    initial: &[f64],
) -> Result<CurveFit> {
    if xs.len() != ys.len() || xs.len() != sigmas.len() {
        return Err(Error::DegenerateData(
            "x, y and sigma columns differ in length".into(),
        ));
    }
    if initial.len() != model.n_params() {
        return Err(Error::param("initial", "wrong number of parameters"));
    }
    if xs.len() < initial.len() {
        return Err(Error::DegenerateData(format!(
            "{} points cannot constrain {} parameters",
            xs.len(),
            initial.len()
        )));
    }
    if let Some(s) = sigmas.iter().find(|s| !(s.is_finite() && **s > 0.0)) {
        return Err(Error::param("sigma", format!("must be positive, got {s}")));
    }

    let problem = Problem {
        model,
        xs,
        ys,
        sigmas,
        p: DVector::from_column_slice(initial),
    };
    let (problem, report) = LevenbergMarquardt::new()
        .with_ftol(RELATIVE_COST_TOLERANCE)
        .with_patience(MAX_ITERATIONS)
        .minimize(problem);

    let (r, j) = problem.weighted();
    let cost = 0.5 * r.norm_squared();
    let accepted = report.termination.was_successful()
        || matches!(
            report.termination,
            TerminationReason::NoImprovementPossible(_)
        );
    if !accepted || !problem.p.iter().all(|v| v.is_finite()) {
        return Err(Error::FitNotConverged {
            iterations: report.number_of_evaluations,
            cost,
            residual_rms: (r.norm_squared() / r.len() as f64).sqrt(),
        });
    }
    let n = problem.p.len();
    let covariance = (j.transpose() * &j)
        .try_inverse()
        .unwrap_or_else(|| DMatrix::from_element(n, n, f64::NAN));
    Ok(CurveFit {
        params: problem.p.iter().copied().collect(),
        covariance,
        cost,
        evaluations: report.number_of_evaluations,
    })
}

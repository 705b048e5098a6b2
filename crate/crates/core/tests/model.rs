use std::f64::consts::TAU;

use proptest::prelude::*;
use rand_distr::{Distribution, Normal};
use stirap_core::model::{
    eta_model, fit_eta_curve, fit_loglinear, fit_rabi_flop, optimal_pulse, DataPoint, EtaFitter,
    Fitter, FitterRegistry,
};
use stirap_core::rng::rng_from_seed;

const US: f64 = 1e-6;

fn eta_points(ta: f64, td: f64, a: f64, n: i32, rel_noise: f64, seed: u64) -> Vec<DataPoint> {
    let mut rng = rng_from_seed(seed);
    let unit = Normal::new(0.0, 1.0).unwrap();
    (0..20)
        .map(|i| {
            let t = 10f64.powf(-6.0 + 3.5 * i as f64 / 19.0);
            let y = a * eta_model(t, ta, td).unwrap().powi(n);
            let sigma = rel_noise * y;
            let noisy = if rel_noise > 0.0 {
                y + sigma * unit.sample(&mut rng)
            } else {
                y
            };
            DataPoint::new(t, noisy, sigma.max(1e-6))
        })
        .collect()
}

#[test]
fn eta_fit_is_exact_on_its_own_model() {
    let fit = fit_eta_curve(&eta_points(1.0 * US, 5e-3, 0.8, 10, 0.0, 0), 10).unwrap();
    assert!((fit.tau_adi / (1.0 * US) - 1.0).abs() < 1e-6);
    assert!((fit.tau_deph / 5e-3 - 1.0).abs() < 1e-6);
    assert!((fit.amplitude / 0.8 - 1.0).abs() < 1e-6);
    assert!(!fit.amplitude_fixed);
}

#[test]
fn eta_fit_with_one_percent_noise() {
    let trials = 100;
    let good = (0..trials)
        .filter(|&seed| {
            let fit = fit_eta_curve(&eta_points(1.0 * US, 5e-3, 0.8, 10, 0.01, seed), 10).unwrap();
            (fit.tau_adi / (1.0 * US) - 1.0).abs() < 0.1
                && (fit.tau_deph / 5e-3 - 1.0).abs() < 0.1
                && (fit.amplitude / 0.8 - 1.0).abs() < 0.1
        })
        .count();
    assert!(good >= 95, "{good} of {trials} trials within 10%");
}

#[test]
fn eta_fitter_reports_optimum() {
    let report = EtaFitter { n_passes: 10 }
        .fit(&eta_points(0.8 * US, 0.73e-3, 0.9, 10, 0.0, 0))
        .unwrap();
    let t_prime = report.get("t_prime").unwrap().value;
    let expect = optimal_pulse(0.8 * US, 0.73e-3).unwrap().t_prime;
    assert!((t_prime / expect - 1.0).abs() < 1e-6);
}

#[test]
fn loglinear_headline_values_from_noisy_series() {
    for (eta, target_sigma, rel, seed) in [(0.987, 0.001, 0.0084, 1u64), (0.942, 0.006, 0.05, 2)] {
        let mut rng = rng_from_seed(seed);
        let unit = Normal::new(0.0, 1.0).unwrap();
        let pts: Vec<DataPoint> = (1..=6)
            .map(|k| {
                let n = 2 * k;
                let y = 0.9 * f64::powi(eta, n);
                DataPoint::new(n as f64, y * (1.0 + rel * unit.sample(&mut rng)), rel * y)
            })
            .collect();
        let fit = fit_loglinear(&pts).unwrap();
        assert!(
            (fit.eta - eta).abs() < 3.0 * fit.eta_sigma,
            "{} vs {eta}",
            fit.eta
        );
        let ratio = fit.eta_sigma / target_sigma;
        assert!(
            (0.5..2.0).contains(&ratio),
            "sigma {} vs {target_sigma}",
            fit.eta_sigma
        );
    }
}

#[test]
fn loglinear_exact_with_prefactor() {
    let pts: Vec<DataPoint> = (1..=6)
        .map(|k| {
            let n = 2 * k;
            let y = 0.9 * 0.987f64.powi(n);
            DataPoint::new(n as f64, y, 0.01 * y)
        })
        .collect();
    let fit = fit_loglinear(&pts).unwrap();
    assert!((fit.eta - 0.987).abs() < 1e-12);
    assert!((fit.p0 - 0.9).abs() < 1e-12);
}

fn rabi_points(step: usize) -> Vec<DataPoint> {
    (0..200)
        .step_by(step)
        .map(|i| {
            let tau = i as f64 * 20e-9;
            let y = 0.5 + 0.5 * (-tau / 50e-6).exp() * (TAU * 1.19e6 * tau).cos();
            DataPoint::new(tau, y, 0.01)
        })
        .collect()
}

#[test]
fn rabi_frequency_recovered() {
    let fit = fit_rabi_flop(&rabi_points(1)).unwrap();
    assert!((fit.omega / TAU / 1.19e6 - 1.0).abs() < 1e-3);
    assert!(fit.omega_sigma > 0.0);
}

#[test]
fn rabi_frequency_stable_under_decimation() {
    let full = fit_rabi_flop(&rabi_points(1)).unwrap();
    let half = fit_rabi_flop(&rabi_points(2)).unwrap();
    assert!((half.omega / full.omega - 1.0).abs() < 0.01);
}

#[test]
fn registry_selects_by_name() {
    let r = FitterRegistry::builtin(10);
    assert_eq!(r.names(), vec!["eta", "loglinear", "rabi"]);
    assert!(r.get("bogus").is_err());
    let rep = r.get("rabi").unwrap().fit(&rabi_points(1)).unwrap();
    let f = rep.get("frequency").unwrap().value;
    assert!((f / 1.19e6 - 1.0).abs() < 1e-3);
}

#[test]
fn optimum_found_numerically() {
    let (ta, td) = (0.8 * US, 0.73e-3);
    let (mut a, mut b) = (1e-6f64.ln(), 1e-3f64.ln());
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let f = |x: f64| eta_model(x.exp(), ta, td).unwrap();
    while b - a > 1e-9 {
        let (x1, x2) = (b - g * (b - a), a + g * (b - a));
        if f(x1) > f(x2) {
            b = x2;
        } else {
            a = x1;
        }
    }
    let t = ((a + b) / 2.0).exp();
    let opt = optimal_pulse(ta, td).unwrap();
    assert!((t / opt.t_prime - 1.0).abs() < 1e-6);
}

proptest! {
    #[test]
    fn t_prime_is_a_maximum(ta in 1e-8f64..1e-5, ratio in 10.0f64..1e5) {
        let td = ta * ratio;
        let opt = optimal_pulse(ta, td).unwrap();
        for eps in [0.01, 0.1, 0.5] {
            for t in [opt.t_prime * (1.0 + eps), opt.t_prime * (1.0 - eps)] {
                prop_assert!(eta_model(t, ta, td).unwrap() < opt.eta_peak);
            }
        }
    }

    #[test]
    fn eta_model_in_unit_interval(t in 1e-9f64..1.0, ta in 1e-9f64..1e-3, td in 1e-6f64..1.0) {
        let v = eta_model(t, ta, td).unwrap();
        prop_assert!(v > 0.0 && v < 1.0);
    }

    #[test]
    fn loglinear_slope_ignores_scale(scale in 0.1f64..10.0) {
        let pts = |s: f64| -> Vec<DataPoint> {
            (1..=5).map(|k| {
                let y = s * 0.95f64.powi(2 * k);
                DataPoint::new(2.0 * k as f64, y, 0.01 * y)
            }).collect()
        };
        let a = fit_loglinear(&pts(1.0)).unwrap();
        let b = fit_loglinear(&pts(scale)).unwrap();
        prop_assert!((a.slope - b.slope).abs() < 1e-12);
        prop_assert!((b.intercept - a.intercept - scale.ln()).abs() < 1e-12);
    }
}

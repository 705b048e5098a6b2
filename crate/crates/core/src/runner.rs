//! Experiment kinds selectable by name, and the run driver that writes
//! `results.csv`, `resolved_config.toml` and `metadata.json`.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::path::PathBuf;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde_json::json;

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::experiments::{
    run_duration_sweep, run_npass_series, run_rabi_landscape, with_workers, worker_count,
    SweepResult,
};
use crate::model::{DataPoint, FitReport, FitterRegistry};
use crate::output::{fmt_num, read_points_path, RunMetadata, Table};
use crate::rng::PRNG_ALGORITHM;
use crate::spectra::suppression_db;

pub const RESULTS_FILE: &str = "results.csv";
pub const RESOLVED_CONFIG_FILE: &str = "resolved_config.toml";
pub const METADATA_FILE: &str = "metadata.json";

pub const SEED_SCHEME: &str = "realization = splitmix(master, k); \
    stream = splitmix(realization, pass, source); detuning model i = splitmix(stream, i)";

/// Smallest sigma handed to a fit, so noiseless points do not get infinite weight.
pub const SIGMA_FLOOR: f64 = 1e-4;

/// What an experiment hands back to the driver.
#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub table: Table,
    pub summary: serde_json::Value,
}

pub trait Experiment: Send + Sync {
    fn name(&self) -> &'static str;
    fn description(&self) -> &'static str;
    fn run(&self, config: &RunConfig) -> Result<ExperimentOutput>;
}

fn fit_summary(result: Result<FitReport>) -> serde_json::Value {
    match result {
        Ok(r) => serde_json::to_value(r).unwrap_or(serde_json::Value::Null),
        Err(e) => {
            log::warn!("fit failed: {e}");
            json!({ "error": e.to_string() })
        }
    }
}

fn points(sweep: &SweepResult, x_scale: f64) -> Vec<DataPoint> {
    sweep
        .rows
        .iter()
        .map(|r| DataPoint::new(r.axis * x_scale, r.mean, r.std_error.max(SIGMA_FLOOR)))
        .collect()
}

pub struct DurationSweep;

impl Experiment for DurationSweep {
    fn name(&self) -> &'static str {
        "duration_sweep"
    }

    fn description(&self) -> &'static str {
        "N-pass recovery vs pulse duration, with an eta(T) fit"
    }

    fn run(&self, config: &RunConfig) -> Result<ExperimentOutput> {
        let ensemble = config.ensemble()?;
        let sweep = run_duration_sweep(&config.durations(), &config.stirap_params(), &ensemble)?;
        let mut table = Table::new(&[
            "pulse_duration_us",
            "recovery_mean",
            "recovery_std_error",
            "n_passes",
            "n_realizations",
            "master_seed",
        ]);
        for r in &sweep.rows {
            table.push(vec![
                fmt_num(r.axis * 1e6),
                fmt_num(r.mean),
                fmt_num(r.std_error),
                config.n_passes.to_string(),
                r.n_realizations.to_string(),
                r.master_seed.to_string(),
            ]);
        }
        let fitters = FitterRegistry::builtin(config.n_passes);
        let fit = fitters.get("eta").and_then(|f| f.fit(&points(&sweep, 1.0)));
        Ok(ExperimentOutput {
            table,
            summary: json!({ "eta_fit": fit_summary(fit) }),
        })
    }
}

pub struct NpassSeries;

impl Experiment for NpassSeries {
    fn name(&self) -> &'static str {
        "npass_series"
    }

    fn description(&self) -> &'static str {
        "recovery vs even number of one-way passes, with a log-linear fit"
    }

    fn run(&self, config: &RunConfig) -> Result<ExperimentOutput> {
        let ensemble = config.ensemble()?;
        let sweep = run_npass_series(&config.pass_counts, &config.stirap_params(), &ensemble)?;
        let mut table = Table::new(&[
            "n_passes",
            "recovery_mean",
            "recovery_std_error",
            "pulse_duration_us",
            "n_realizations",
            "master_seed",
        ]);
        for r in &sweep.rows {
            table.push(vec![
                (r.axis as u32).to_string(),
                fmt_num(r.mean),
                fmt_num(r.std_error),
                fmt_num(r.pulse_duration * 1e6),
                r.n_realizations.to_string(),
                r.master_seed.to_string(),
            ]);
        }
        let pts: Vec<_> = points(&sweep, 1.0)
            .into_iter()
            .filter(|p| p.x > 0.0)
            .collect();
        let fit = FitterRegistry::builtin(config.n_passes)
            .get("loglinear")
            .and_then(|f| f.fit(&pts));
        Ok(ExperimentOutput {
            table,
            summary: json!({ "loglinear_fit": fit_summary(fit) }),
        })
    }
}

pub struct RabiLandscape;

impl Experiment for RabiLandscape {
    fn name(&self) -> &'static str {
        "rabi_landscape"
    }

    fn description(&self) -> &'static str {
        "lowest single-pass error vs average peak Rabi frequency, T optimized per point"
    }

    fn run(&self, config: &RunConfig) -> Result<ExperimentOutput> {
        let ensemble = config.ensemble()?;
        let omegas: Vec<f64> = config.omega_bar_hz.iter().map(|f| TAU * f).collect();
        let sweep = run_rabi_landscape(
            &omegas,
            &config.stirap_params(),
            &ensemble,
            &config.duration_search(),
        )?;
        let mut table = Table::new(&[
            "omega_bar_hz",
            "error_rate",
            "error_std_error",
            "efficiency",
            "optimal_pulse_duration_us",
            "at_boundary",
            "n_realizations",
            "master_seed",
        ]);
        for r in &sweep.rows {
            table.push(vec![
                fmt_num(r.axis / TAU),
                fmt_num(1.0 - r.mean),
                fmt_num(r.std_error),
                fmt_num(r.mean),
                fmt_num(r.pulse_duration * 1e6),
                r.at_boundary.to_string(),
                r.n_realizations.to_string(),
                r.master_seed.to_string(),
            ]);
        }
        let boundary: Vec<f64> = sweep
            .rows
            .iter()
            .filter(|r| r.at_boundary)
            .map(|r| r.axis / TAU)
            .collect();
        Ok(ExperimentOutput {
            table,
            summary: json!({ "at_boundary_omega_bar_hz": boundary }),
        })
    }
}

pub struct SuppressionCurve;

impl Experiment for SuppressionCurve {
    fn name(&self) -> &'static str {
        "suppression_curve"
    }

    fn description(&self) -> &'static str {
        "feedforward suppression vs gain at fixed delay mismatch and frequency"
    }

    fn run(&self, config: &RunConfig) -> Result<ExperimentOutput> {
        let table = suppression_table(
            &config.gains(),
            config.suppression_delay_ns,
            config.suppression_frequency_hz,
        )?;
        Ok(ExperimentOutput {
            table,
            summary: json!({}),
        })
    }
}

/// `gain,suppression_db,frequency_hz,delay_ns` rows.
pub fn suppression_table(gains: &[f64], delay_ns: f64, frequency_hz: f64) -> Result<Table> {
    let mut table = Table::new(&["gain", "suppression_db", "frequency_hz", "delay_ns"]);
    for &g in gains {
        let s = suppression_db(g, delay_ns * 1e-9, frequency_hz)?;
        table.push(vec![
            fmt_num(g),
            fmt_num(s),
            fmt_num(frequency_hz),
            fmt_num(delay_ns),
        ]);
    }
    Ok(table)
}

pub struct FitOnly;

impl Experiment for FitOnly {
    fn name(&self) -> &'static str {
        "fit_only"
    }

    fn description(&self) -> &'static str {
        "fit an x,y,sigma CSV with the selected fit kind"
    }

    fn run(&self, config: &RunConfig) -> Result<ExperimentOutput> {
        let pts = read_points_path(config.resolve_path(&config.fit_input))?;
        let report = FitterRegistry::builtin(config.n_passes)
            .get(&config.fit_kind)?
            .fit(&pts)?;
        Ok(ExperimentOutput {
            table: fit_table(&report),
            summary: serde_json::to_value(&report)?,
        })
    }
}

/// `parameter,value,sigma,unit` rows.
pub fn fit_table(report: &FitReport) -> Table {
    let mut table = Table::new(&["parameter", "value", "sigma", "unit"]);
    for p in &report.parameters {
        table.push(vec![
            p.name.clone(),
            fmt_num(p.value),
            fmt_num(p.sigma),
            p.unit.clone(),
        ]);
    }
    table
}

/// Experiment kinds selectable by name.
pub struct ExperimentRegistry {
    experiments: BTreeMap<&'static str, Box<dyn Experiment>>,
}

impl ExperimentRegistry {
    pub fn empty() -> Self {
        Self {
            experiments: BTreeMap::new(),
        }
    }

    pub fn builtin() -> Self {
        let mut r = Self::empty();
        r.register(Box::new(DurationSweep));
        r.register(Box::new(NpassSeries));
        r.register(Box::new(RabiLandscape));
        r.register(Box::new(SuppressionCurve));
        r.register(Box::new(FitOnly));
        r
    }

    pub fn register(&mut self, experiment: Box<dyn Experiment>) {
        self.experiments.insert(experiment.name(), experiment);
    }

    pub fn get(&self, name: &str) -> Result<&dyn Experiment> {
        self.experiments
            .get(name)
            .map(|e| e.as_ref())
            .ok_or_else(|| Error::UnknownStrategy {
                kind: "experiment",
                name: name.into(),
                available: self.names().join(", "),
            })
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.experiments.keys().copied().collect()
    }
}

/// Where a finished run left its files.
#[derive(Debug, Clone)]
pub struct RunRecord {
    pub output_dir: PathBuf,
    pub metadata: RunMetadata,
}

/// Runs the configured experiment with the builtin registry.
pub fn run(config: &RunConfig) -> Result<RunRecord> {
    run_with(&ExperimentRegistry::builtin(), config)
}

pub fn run_with(registry: &ExperimentRegistry, config: &RunConfig) -> Result<RunRecord> {
    config.validate()?;
    let experiment = registry.get(&config.experiment)?;
    let out_dir = config.output_path();
    std::fs::create_dir_all(&out_dir)?;
    std::fs::write(
        out_dir.join(RESOLVED_CONFIG_FILE),
        config.resolved().to_toml()?,
    )?;

    let started_unix_s = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_secs());
    let workers = worker_count();
    log::info!("running {} on {workers} workers", experiment.name());
    let clock = Instant::now();
    let output = with_workers(Some(workers), || experiment.run(config))?;
    let wall_time_s = clock.elapsed().as_secs_f64();

    let file = std::fs::File::create(out_dir.join(RESULTS_FILE))?;
    output.table.write_csv(std::io::BufWriter::new(file))?;
    let metadata = RunMetadata {
        experiment: experiment.name().into(),
        crate_version: env!("CARGO_PKG_VERSION").into(),
        prng: PRNG_ALGORITHM.into(),
        seed_scheme: SEED_SCHEME.into(),
        master_seed: config.master_seed,
        n_realizations: config.n_realizations,
        workers,
        started_unix_s,
        wall_time_s,
        results_file: RESULTS_FILE.into(),
        config_file: RESOLVED_CONFIG_FILE.into(),
        summary: output.summary,
    };
    metadata.write_json(out_dir.join(METADATA_FILE))?;
    log::info!(
        "wrote results to {} in {wall_time_s:.1} s",
        out_dir.display()
    );
    Ok(RunRecord {
        output_dir: out_dir,
        metadata,
    })
}

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use stirap_core::model::FitterRegistry;
use stirap_core::output::read_points_path;
use stirap_core::runner::{fit_table, suppression_table};
use stirap_core::{load_config, run, Error, ExperimentRegistry};

#[derive(Parser)]
#[command(
    name = "stirap-sim",
    version,
    about = "Monte Carlo STIRAP transfer under laser phase noise"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a config file.
    Run { config: PathBuf },
    /// Parse and validate a config, then print it with all defaults filled in.
    Validate { config: PathBuf },
    /// Print feedforward suppression vs gain as CSV.
    Suppression {
        #[arg(long, default_value_t = 0.5)]
        gain_min: f64,
        #[arg(long, default_value_t = 1.5)]
        gain_max: f64,
        /// Delay mismatch in ns.
        #[arg(long, default_value_t = 0.0)]
        delay: f64,
        #[arg(long, default_value_t = 101)]
        points: usize,
        /// Noise frequency in Hz.
        #[arg(long, default_value_t = 1e6)]
        frequency: f64,
    },
    /// Fit an x,y,sigma CSV and print the parameters as CSV.
    Fit {
        #[arg(long, value_enum)]
        kind: FitKind,
        data: PathBuf,
        /// Passes per recovery point for the eta fit.
        #[arg(long, default_value_t = 10)]
        n_passes: u32,
    },
    /// List experiment and fit kinds.
    List,
}

#[derive(Clone, Copy, ValueEnum)]
enum FitKind {
    Eta,
    Loglinear,
    Rabi,
}

impl FitKind {
    fn name(self) -> &'static str {
        match self {
            FitKind::Eta => "eta",
            FitKind::Loglinear => "loglinear",
            FitKind::Rabi => "rabi",
        }
    }
}

fn execute(command: Command) -> stirap_core::Result<()> {
    let mut stdout = std::io::stdout().lock();
    match command {
        Command::Run { config } => {
            let config = load_config(&config)?;
            let record = run(&config)?;
            writeln!(stdout, "{}", record.output_dir.display())?;
        }
        Command::Validate { config } => {
            let config = load_config(&config)?;
            write!(stdout, "{}", config.resolved().to_toml()?)?;
        }
        Command::Suppression {
            gain_min,
            gain_max,
            delay,
            points,
            frequency,
        } => {
            if points < 2 || gain_max.partial_cmp(&gain_min).is_none_or(|o| o.is_lt()) {
                return Err(Error::InvalidParameter {
                    name: "gain range".into(),
                    reason: "need gain_max >= gain_min and at least 2 points".into(),
                });
            }
            let gains: Vec<f64> = (0..points)
                .map(|i| gain_min + (gain_max - gain_min) * i as f64 / (points - 1) as f64)
                .collect();
            suppression_table(&gains, delay, frequency)?.write_csv(&mut stdout)?;
        }
        Command::Fit {
            kind,
            data,
            n_passes,
        } => {
            let points = read_points_path(&data)?;
            let report = FitterRegistry::builtin(n_passes)
                .get(kind.name())?
                .fit(&points)?;
            for note in &report.notes {
                log::info!("{note}");
            }
            fit_table(&report).write_csv(&mut stdout)?;
        }
        Command::List => {
            let experiments = ExperimentRegistry::builtin();
            for name in experiments.names() {
                let e = experiments.get(name)?;
                writeln!(stdout, "experiment  {name:<18} {}", e.description())?;
            }
            let fitters = FitterRegistry::builtin(10);
            for name in fitters.names() {
                writeln!(
                    stdout,
                    "fit         {name:<18} {}",
                    fitters.get(name)?.columns()
                )?;
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Config { .. }
                | Error::InvalidParameter { .. }
                | Error::UnknownStrategy { .. } => ExitCode::from(2),
                _ => ExitCode::FAILURE,
            }
        }
    }
}

//! Monte Carlo simulation of STIRAP population transfer in the presence of laser
//! phase noise, with a model of feedforward noise cancellation.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod grid;
pub mod model;
pub mod output;
pub mod rng;
pub mod runner;
pub mod spectra;

pub use config::{load_config, RunConfig};
pub use error::{Error, Result};
pub use runner::{run, Experiment, ExperimentRegistry};

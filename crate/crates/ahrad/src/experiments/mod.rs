//! Experiment pipelines. Each returns its artifacts and inline checks.

pub mod convergence;
pub mod evolve;
pub mod field;
pub mod h3;
pub mod invert;
pub mod recover;
pub mod scatter;

use ahrad_core::radial::indicial_deviation;
use ahrad_core::{Mode, WarpedMetric};

use crate::config::{Experiment, RunConfig};
use crate::error::Result;
use crate::output::{Check, Outcome};

/// Runs `exp` on a validated configuration; `hash` is stamped into JSON artifacts.
pub fn run(exp: Experiment, cfg: &RunConfig, hash: &str) -> Result<Outcome> {
    match exp {
        Experiment::Evolve => evolve::run(cfg, hash),
        Experiment::Field => field::run(cfg, hash),
        Experiment::Scatter => scatter::run(cfg, hash),
        Experiment::Invert => invert::run(cfg, hash),
        Experiment::OracleH3 => h3::run(cfg, hash),
        Experiment::Recover => recover::run(cfg, hash),
        Experiment::Convergence => convergence::run(cfg, hash),
    }
}

/// Frequencies at which the indicial roots are checked.
pub const INDICIAL_LAMBDAS: [f64; 6] = [0.0, 0.5, 1.0, 2.0, 4.0, 8.0];

/// Indicial roots equal n/2 ± iλ on every mode.
pub fn indicial_check(m: &WarpedMetric, modes: &[Mode], tol: f64) -> Check {
    let worst = modes
        .iter()
        .flat_map(|&k| INDICIAL_LAMBDAS.iter().map(move |&l| indicial_deviation(m, k, l)))
        .fold(0.0, f64::max);
    Check::at_most("indicial_roots", worst, tol)
}

/// Sorted, deduplicated modes.
pub fn unique_modes(modes: impl IntoIterator<Item = Mode>) -> Vec<Mode> {
    let mut v: Vec<Mode> = modes.into_iter().collect();
    v.sort();
    v.dedup();
    v
}

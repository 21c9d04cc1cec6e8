//! Dynamic and stationary scattering multipliers a_k(λ) and their agreement.

use ahrad_core::fields::lambda_grid;
use ahrad_core::scattering::{scattering_matrix_dynamic, scattering_sample_stationary, ScatteringSample};
use ahrad_core::{DataSpec, GridSpec, Mode, WarpedMetric};
use rayon::prelude::*;
use serde::Serialize;

use super::indicial_check;
use crate::config::{BumpConfig, RunConfig};
use crate::error::{Context, Result};
use crate::output::{mode_label, sci, Artifact, Check, Outcome};

/// Scattering JSON record; masked and undefined values are null.
#[derive(Clone, Debug, Serialize)]
pub struct Record {
    pub config_hash: String,
    pub k: serde_json::Value,
    pub lambda: Vec<f64>,
    pub a_re: Vec<Option<f64>>,
    pub a_im: Vec<Option<f64>>,
    pub method: &'static str,
    pub masked: Vec<bool>,
}

impl Record {
    pub fn new(n: usize, s: &ScatteringSample, hash: &str) -> Self {
        let finite = |v: f64| v.is_finite().then_some(v);
        let k = if n == 1 { serde_json::json!(s.mode.0[0]) } else { serde_json::json!(s.mode.0) };
        Record {
            config_hash: hash.to_string(),
            k,
            lambda: s.lambdas.clone(),
            a_re: s.a.iter().map(|a| finite(a.re)).collect(),
            a_im: s.a.iter().map(|a| finite(a.im)).collect(),
            method: s.method.name(),
            masked: s.masked.clone(),
        }
    }
}

/// Both multipliers for one mode.
#[derive(Clone, Debug)]
pub struct ModeScattering {
    pub dynamic: ScatteringSample,
    pub stationary: ScatteringSample,
    /// Largest relative gap on the check window.
    pub gap: f64,
    /// Largest ||a| − 1| of the dynamic multiplier on the check window.
    pub unitarity: f64,
}

/// Probe on mode k built from bump lists.
pub fn probe(k: Mode, f1: &[BumpConfig], f2: &[BumpConfig]) -> DataSpec {
    DataSpec { modes: vec![(k, f1.iter().map(|b| b.bump()).collect(), f2.iter().map(|b| b.bump()).collect())] }
}

/// Dynamic against stationary a_k on `lambdas`, compared on `window`.
pub fn compare_mode(
    m: &WarpedMetric,
    k: Mode,
    lambdas: &[f64],
    probe: &DataSpec,
    g: &GridSpec,
    window: [f64; 2],
) -> Result<ModeScattering> {
    let dynamic = scattering_matrix_dynamic(m, k, lambdas, &probe.sample(m, g), g)
        .context(format!("dynamic multiplier, mode {:?}", k.0))?;
    let stationary =
        scattering_sample_stationary(m, k, lambdas).context(format!("stationary multiplier, mode {:?}", k.0))?;
    let gap = dynamic.max_relative_gap(&stationary, window[0], window[1]).context("multiplier comparison")?;
    let unitarity = dynamic
        .unmasked()
        .filter(|(l, _)| *l >= window[0] && *l <= window[1])
        .map(|(_, a)| (a.norm() - 1.0).abs())
        .fold(0.0, f64::max);
    Ok(ModeScattering { dynamic, stationary, gap, unitarity })
}

pub fn run(cfg: &RunConfig, hash: &str) -> Result<Outcome> {
    let m = cfg.metric()?;
    let g = cfg.grid_spec()?;
    let sc = &cfg.scatter;
    let tol = &cfg.tolerances;
    let lambdas = lambda_grid(sc.lambda_points, sc.lambda_max);
    let modes: Vec<Mode> = sc.modes.iter().map(|k| k.mode()).collect();
    let results: Vec<Result<ModeScattering>> = modes
        .par_iter()
        .map(|&k| compare_mode(&m, k, &lambdas, &probe(k, &sc.probe_f1, &sc.probe_f2), &g, sc.window))
        .collect();
    let mut out = Outcome::default();
    let mut records = Vec::new();
    let mut rows = Vec::new();
    let (mut gap, mut unitarity) = (0.0f64, 0.0f64);
    for r in results {
        let s = r?;
        gap = gap.max(s.gap);
        unitarity = unitarity.max(s.unitarity);
        records.push(Record::new(m.n, &s.dynamic, hash));
        records.push(Record::new(m.n, &s.stationary, hash));
        let k = mode_label(m.n, s.dynamic.mode);
        for i in 0..lambdas.len() {
            let (a, b) = (s.dynamic.a[i], s.stationary.a[i]);
            let masked = s.dynamic.masked[i] || s.stationary.masked[i];
            let rel = if masked { f64::NAN } else { (a - b).norm() / b.norm() };
            rows.push(vec![
                k.clone(),
                sci(lambdas[i]),
                sci(a.re),
                sci(a.im),
                sci(b.re),
                sci(b.im),
                sci(rel),
                masked.to_string(),
            ]);
        }
    }
    out.artifacts.push(Artifact::json("scattering.json", &records)?);
    let header = ["k", "lambda", "dynamic_re", "dynamic_im", "stationary_re", "stationary_im", "rel_gap", "masked"];
    out.artifacts.push(Artifact::csv("agreement.csv", &header, rows)?);
    out.checks.push(Check::at_most("scattering_agreement", gap, tol.scattering_agreement));
    out.checks.push(Check::at_most("scattering_unitarity", unitarity, tol.scattering_unitarity));
    out.checks.push(indicial_check(&m, &modes, tol.indicial));
    Ok(out)
}

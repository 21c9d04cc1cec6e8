//! Jump extraction against the closed-form amplitude, transport oracle and support sharpness.

use ahrad_core::fields::{backward_field, Window};
use ahrad_core::inverse::{
    jump_amplitude, predicted_jump, support_roundtrip, transport_v1, transport_v1_closed, JumpFit, JumpMeasurement,
};
use ahrad_core::scattering::membership_mb;
use ahrad_core::{DataSpec, GridSpec, WarpedMetric};
use rayon::prelude::*;
use serde::Serialize;

use super::{indicial_check, unique_modes};
use crate::config::RunConfig;
use crate::data::odd_probes;
use crate::error::{Context, Result};
use crate::output::{Artifact, Check, Outcome};

/// Inverse JSON report. Entries are per (probe, x₁, mode); J values are moduli, rel_err is complex.
#[derive(Clone, Debug, Default, Serialize)]
pub struct InverseReport {
    pub config_hash: String,
    pub x1: Vec<f64>,
    #[serde(rename = "J_measured")]
    pub j_measured: Vec<f64>,
    #[serde(rename = "J_predicted")]
    pub j_predicted: Vec<f64>,
    pub rel_err: Vec<f64>,
    pub verdict: &'static str,
    pub first_diff_x1: Option<f64>,
    pub k: Vec<String>,
    pub probe: Vec<usize>,
}

impl InverseReport {
    pub fn push(&mut self, probe: usize, k: String, x1: f64, measured: ahrad_core::C64, predicted: ahrad_core::C64) {
        self.probe.push(probe);
        self.k.push(k);
        self.x1.push(x1);
        self.j_measured.push(measured.norm());
        self.j_predicted.push(predicted.norm());
        self.rel_err.push(if predicted.norm() > 0.0 { (measured - predicted).norm() / predicted.norm() } else { 0.0 });
    }

    /// Sets the verdict from rel_err against `tol`.
    pub fn decide(&mut self, tol: f64) {
        self.first_diff_x1 =
            self.x1.iter().zip(&self.rel_err).filter(|(_, &e)| e > tol).map(|(&x, _)| x).reduce(f64::min);
        self.verdict = if self.first_diff_x1.is_some() { "differ" } else { "equal" };
    }

    pub fn max_rel_err(&self) -> f64 {
        self.rel_err.iter().cloned().fold(0.0, f64::max)
    }
}

/// Jumps of one probe across the ladder.
pub fn probe_jumps(
    m: &WarpedMetric,
    probe: &DataSpec,
    ladder: &[f64],
    mollifier: f64,
    g: &GridSpec,
) -> Result<(Vec<JumpMeasurement>, f64)> {
    let f = backward_field(m, &probe.sample(m, g), g).context("probe field")?;
    let membership = membership_mb(m, &f, g).context("membership residual")?;
    let phi = Window::mollifier(mollifier, g.ds);
    let jumps: Vec<Result<JumpMeasurement>> = ladder
        .par_iter()
        .map(|&x1| jump_amplitude(m, &f, x1, &phi, g, &JumpFit::default()).context(format!("jump at x1 = {x1}")))
        .collect();
    Ok((jumps.into_iter().collect::<Result<Vec<_>>>()?, membership))
}

/// Largest relative deviation of the integrated v₁⁺ from its closed form.
pub fn transport_error(m: &WarpedMetric, x1: f64, w: ahrad_core::C64, steps: usize) -> f64 {
    let path = transport_v1(m, x1, w, steps);
    let scale = transport_v1_closed(m, x1, w, x1).norm();
    if scale == 0.0 {
        return 0.0;
    }
    path.iter().map(|&(x, v)| (v - transport_v1_closed(m, x1, w, x)).norm() / scale).fold(0.0, f64::max)
}

pub fn run(cfg: &RunConfig, hash: &str) -> Result<Outcome> {
    let m = cfg.metric()?;
    let g = cfg.grid_spec()?;
    let tol = &cfg.tolerances;
    let inv = &cfg.invert;
    let probes = odd_probes(cfg.data()?, cfg.seed)?;
    let mut report = InverseReport { config_hash: hash.to_string(), ..Default::default() };
    let (mut membership, mut transport, mut cells) = (0.0f64, 0.0f64, 0.0f64);
    for (p, probe) in probes.iter().enumerate() {
        let (jumps, mb) = probe_jumps(&m, probe, &inv.x1, inv.mollifier, &g)?;
        membership = membership.max(mb);
        for j in &jumps {
            for (i, &k) in j.modes.iter().enumerate() {
                let pred = predicted_jump(&m, j.w[i], j.x1);
                report.push(p, crate::output::mode_label(m.n, k), j.x1, j.jump[i], pred);
                transport = transport.max(transport_error(&m, j.x1, j.w[i], inv.transport_steps));
            }
        }
        let support = support_roundtrip(&m, &probe.sample(&m, &g), &g).context("support round trip")?;
        cells = cells.max(support.cells());
    }
    report.decide(tol.jump);
    let mut out = Outcome::default();
    out.checks.push(Check::at_most("jump_formula", report.max_rel_err(), tol.jump));
    out.checks.push(Check::at_most("transport_closed_form", transport, tol.transport));
    out.checks.push(Check::at_most("membership_mb", membership, tol.membership));
    out.checks.push(Check::at_most("support_sharpness_cells", cells, tol.support_cells));
    let modes = unique_modes(probes.iter().flat_map(|p| p.mode_list()));
    out.checks.push(indicial_check(&m, &modes, tol.indicial));
    out.artifacts.push(Artifact::json("inverse.json", &report)?);
    Ok(out)
}

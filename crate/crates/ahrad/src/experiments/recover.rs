//! Collar profile comparison of two metrics through the jump pipeline.

use ahrad_core::fields::{lambda_grid, Window};
use ahrad_core::inverse::{recover_profile, ProfileComparison, Recovery, Verdict};
use ahrad_core::scattering::scattering_matrix_dynamic;
use ahrad_core::{GridSpec, WarpedMetric};
use serde::Serialize;

use super::scatter::probe;
use super::{indicial_check, invert::InverseReport, unique_modes};
use crate::config::{Expectation, RunConfig};
use crate::data::odd_probes;
use crate::error::{Context, Result};
use crate::output::{mode_label, Artifact, Check, Outcome};

#[derive(Serialize)]
struct Report {
    #[serde(flatten)]
    inverse: InverseReport,
    ladder: Vec<f64>,
    rel_diff: Vec<f64>,
    field_gap: Vec<f64>,
    operators_agree: bool,
    warp_reference: Vec<f64>,
    warp_compare: Vec<f64>,
    /// Largest relative gap of the dynamic multipliers of the two metrics.
    a_gap: f64,
}

/// Inverse report with J_measured from the compared metric and J_predicted from the reference.
pub fn inverse_report(n: usize, c: &ProfileComparison, hash: &str) -> InverseReport {
    let mut r = InverseReport { config_hash: hash.to_string(), ..Default::default() };
    for (p, (refs, cmps)) in c.reference.iter().zip(&c.compare).enumerate() {
        for (jr, jc) in refs.iter().zip(cmps) {
            for (i, &k) in jr.modes.iter().enumerate() {
                r.push(p, mode_label(n, k), jr.x1, jc.jump[i], jr.jump[i]);
            }
        }
    }
    r.first_diff_x1 = c.first_diff_x1;
    r.verdict = c.verdict.name();
    r
}

/// Largest relative gap between the dynamic multipliers of m₁ and m₂ on the first scatter mode.
pub fn multiplier_gap(m1: &WarpedMetric, m2: &WarpedMetric, g: &GridSpec, cfg: &RunConfig) -> Result<f64> {
    let sc = &cfg.scatter;
    let lambdas = lambda_grid(sc.lambda_points, sc.lambda_max);
    let Some(k) = sc.modes.first().map(|k| k.mode()) else { return Ok(0.0) };
    let p = probe(k, &sc.probe_f1, &sc.probe_f2);
    let a1 = scattering_matrix_dynamic(m1, k, &lambdas, &p.sample(m1, g), g).context("multiplier of metric")?;
    let a2 =
        scattering_matrix_dynamic(m2, k, &lambdas, &p.sample(m2, g), g).context("multiplier of recover.compare")?;
    a2.max_relative_gap(&a1, sc.window[0], sc.window[1]).context("multiplier comparison")
}

pub fn run(cfg: &RunConfig, hash: &str) -> Result<Outcome> {
    let m1 = cfg.metric()?;
    let rc = cfg.recover()?;
    let m2 = rc.compare.build("recover.compare")?;
    let g = cfg.grid_spec()?;
    cfg.grid.build(&m2)?;
    let tol = &cfg.tolerances;
    let probes = odd_probes(cfg.data()?, cfg.seed)?;
    let mut set = Recovery::new(probes.clone(), rc.x1.clone(), &g);
    set.window = Window::mollifier(rc.mollifier, g.ds);
    let c = recover_profile(&m1, &m2, &set, &g).context("profile comparison")?;
    let a_gap = multiplier_gap(&m1, &m2, &g, cfg)?;
    let mut out = Outcome::default();
    let modes = unique_modes(probes.iter().flat_map(|p| p.mode_list()));
    out.checks.push(indicial_check(&m1, &modes, tol.indicial));
    let mut second = indicial_check(&m2, &modes, tol.indicial);
    second.name = "indicial_roots_compare".into();
    out.checks.push(second);
    match rc.expect {
        Some(Expectation::Equal) => {
            out.checks.push(Check::holds("verdict_equal", c.verdict == Verdict::Equal));
            out.checks.push(Check::at_most("profile_difference", c.max_rel_diff(), tol.profile));
        }
        Some(Expectation::Differ) => {
            out.checks.push(Check::holds("verdict_differ", c.verdict == Verdict::Differ));
            out.checks.push(Check::holds("flagged_x1", c.first_diff_x1.is_some()));
        }
        None => {}
    }
    let report = Report {
        inverse: inverse_report(m1.n, &c, hash),
        ladder: c.x1.clone(),
        rel_diff: c.rel_diff.clone(),
        field_gap: c.field_gap.clone(),
        operators_agree: c.operators_agree,
        warp_reference: c.warp_reference.clone(),
        warp_compare: c.warp_compare.clone(),
        a_gap,
    };
    out.artifacts.push(Artifact::json("inverse.json", &report)?);
    Ok(out)
}

//! Torus-periodized hyperbolic model against the horospherical quadrature oracle.

use ahrad_core::fields::forward_field;
use ahrad_core::h3::{
    periodized_lax_phillips, periodized_lax_phillips_with, relative_l2, torus_data, torus_field_samples, torus_points,
    LaxPhillips, SeparableBump, SphereQuadrature,
};
use ahrad_core::{GridSpec, Profile, WarpedMetric};
use serde::Serialize;

use crate::config::{H3Config, RunConfig};
use crate::error::{Context, Error, Result};
use crate::output::{sci, Artifact, Check, Outcome};

/// Oracle and model samples with the errors of each refinement direction.
#[derive(Clone, Debug, Serialize)]
pub struct H3Comparison {
    #[serde(skip)]
    pub s: Vec<f64>,
    #[serde(skip)]
    pub y: Vec<[f64; 2]>,
    #[serde(skip)]
    pub oracle: Vec<f64>,
    #[serde(skip)]
    pub model: Vec<f64>,
    /// Relative L² difference at the configured step and quadrature.
    pub rel_l2: f64,
    /// Same, with half the quadrature panels and half the order.
    pub rel_l2_coarse_quadrature: f64,
    /// Same, with the characteristic step doubled.
    pub rel_l2_coarse_step: f64,
}

impl H3Config {
    pub fn source(&self) -> SeparableBump {
        SeparableBump {
            x: (self.x[0], self.x[1]),
            y1: (self.y1[0], self.y1[1]),
            y2: (self.y2[0], self.y2[1]),
            amplitude: self.amplitude,
        }
    }

    pub fn s_samples(&self) -> Vec<f64> {
        (0..self.s_count).map(|i| self.s_start + self.s_step * i as f64).collect()
    }

    pub fn transform(&self) -> LaxPhillips {
        LaxPhillips { quadrature: SphereQuadrature { panels: self.panels, order: self.order }, step: self.step }
    }
}

fn model_samples(m: &WarpedMetric, g: &GridSpec, f: &SeparableBump, s: &[f64], y: &[[f64; 2]]) -> Result<Vec<f64>> {
    let field = forward_field(m, &torus_data(m, g, f), g).context("torus model field")?;
    Ok(torus_field_samples(&field, m.period, s, y))
}

/// Compares the model on `g` with the oracle, and both coarsened variants.
pub fn compare(m: &WarpedMetric, g: &GridSpec, h: &H3Config) -> Result<H3Comparison> {
    let f = h.source();
    let s = h.s_samples();
    let y = torus_points(m.period, h.y_points);
    let lp = h.transform();
    let oracle = periodized_lax_phillips(&f, &s, &y, m.period, lp).context("horospherical oracle")?;
    let coarse_q = LaxPhillips {
        quadrature: SphereQuadrature {
            panels: (lp.quadrature.panels / 2).max(1),
            order: (lp.quadrature.order / 2).max(1),
        },
        ..lp
    };
    let oracle_coarse = periodized_lax_phillips_with(&f, &s, &y, m.period, coarse_q);
    let model = model_samples(m, g, &f, &s, &y)?;
    let coarse_g = GridSpec { delta: 2.0 * g.delta, ..*g };
    let model_coarse = model_samples(m, &coarse_g, &f, &s, &y)?;
    Ok(H3Comparison {
        rel_l2: relative_l2(&model, &oracle),
        rel_l2_coarse_quadrature: relative_l2(&model, &oracle_coarse),
        rel_l2_coarse_step: relative_l2(&model_coarse, &oracle),
        s,
        y,
        oracle,
        model,
    })
}

fn samples_csv(name: &str, c: &H3Comparison, values: &[f64]) -> Result<Artifact> {
    let rows =
        c.s.iter()
            .flat_map(|&s| c.y.iter().map(move |y| (s, *y)))
            .zip(values)
            .map(|((s, y), v)| vec![sci(s), sci(y[0]), sci(y[1]), sci(*v)]);
    Artifact::csv(name, &["s", "y1", "y2", "value"], rows)
}

#[derive(Serialize)]
struct Report<'a> {
    config_hash: &'a str,
    #[serde(flatten)]
    comparison: &'a H3Comparison,
}

pub fn run(cfg: &RunConfig, hash: &str) -> Result<Outcome> {
    let m = cfg.metric()?;
    if m.profile != Profile::Hyperbolic {
        return Err(Error::config("metric.profile", "the oracle needs the hyperbolic profile"));
    }
    if m.n != 2 {
        return Err(Error::config("metric.n", "the oracle lives in three dimensions, n = 2"));
    }
    let g = cfg.grid_spec()?;
    let h = &cfg.h3;
    let last = h.s_samples().last().copied().unwrap_or(h.s_start);
    let wrap = -(h.x[0] + h.x[1]).ln();
    if last >= wrap || last > g.s_max || h.s_start < g.s_min {
        return Err(Error::config("h3.s_count", format!("s-samples must lie in the grid window and below {wrap:.4}")));
    }
    let c = compare(&m, &g, h)?;
    let tol = &cfg.tolerances;
    let mut out = Outcome::default();
    out.checks.push(Check::at_most("h3_rel_l2", c.rel_l2, tol.h3));
    out.checks.push(Check::below("h3_quadrature_refinement", c.rel_l2, c.rel_l2_coarse_quadrature));
    out.checks.push(Check::below("h3_step_refinement", c.rel_l2, c.rel_l2_coarse_step));
    out.artifacts.push(samples_csv("h3_oracle.csv", &c, &c.oracle)?);
    out.artifacts.push(samples_csv("h3_model.csv", &c, &c.model)?);
    out.artifacts.push(Artifact::json("h3.json", &Report { config_hash: hash, comparison: &c })?);
    Ok(out)
}

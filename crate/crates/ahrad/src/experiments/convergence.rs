//! Richardson order estimates under repeated halving of the characteristic step.

use ahrad_core::energy::energy_norm;
use ahrad_core::fields::{field_norm, forward_field, lambda_grid, RadiationField};
use ahrad_core::GridSpec;
use serde::Serialize;

use super::scatter::{compare_mode, probe};
use crate::config::RunConfig;
use crate::data::data_sets;
use crate::error::{Context, Error, Result};
use crate::output::{sci, Artifact, Check, Outcome};

/// Per-level values of one quantity and the orders between consecutive levels.
#[derive(Clone, Debug, Serialize)]
pub struct Series {
    pub quantity: &'static str,
    pub delta: Vec<f64>,
    pub value: Vec<f64>,
    pub order: Vec<Option<f64>>,
}

impl Series {
    /// Orders log₂(vᵢ₋₁/vᵢ) of a quantity that tends to zero.
    fn of_errors(quantity: &'static str, delta: Vec<f64>, value: Vec<f64>) -> Self {
        let order = (0..value.len())
            .map(|i| (i > 0 && value[i] > 0.0 && value[i - 1] > 0.0).then(|| (value[i - 1] / value[i]).log2()))
            .collect();
        Series { quantity, delta, value, order }
    }

    /// Order at the finest pair of levels.
    pub fn finest_order(&self) -> f64 {
        self.order.last().copied().flatten().unwrap_or(f64::NAN)
    }
}

fn max_gap(a: &RadiationField, b: &RadiationField) -> f64 {
    a.modes
        .iter()
        .zip(&b.modes)
        .flat_map(|(x, y)| x.values.iter().zip(&y.values).map(|(u, v)| (u - v).norm()))
        .fold(0.0, f64::max)
}

/// Field self-convergence, unitarity defect and scattering agreement over `levels` step halvings.
pub fn study(cfg: &RunConfig, levels: usize) -> Result<Vec<Series>> {
    if levels < 3 {
        return Err(Error::Precondition(format!("convergence study needs at least 3 levels, got {levels}")));
    }
    let m = cfg.metric()?;
    let base = cfg.grid_spec()?;
    let spec = data_sets(cfg.data()?, cfg.seed)?.remove(0);
    let grids: Vec<GridSpec> =
        (0..levels).map(|j| GridSpec { delta: base.delta / f64::powi(2.0, j as i32), ..base }).collect();
    let deltas: Vec<f64> = grids.iter().map(|g| g.delta).collect();
    let mut fields = Vec::with_capacity(levels);
    let mut defects = Vec::with_capacity(levels);
    for g in &grids {
        let d = spec.sample(&m, g);
        let e = energy_norm(&m, &d).context("energy norm")?;
        let f = forward_field(&m, &d, g).context("forward field")?;
        defects.push((field_norm(&f).powi(2) - e).abs() / e);
        fields.push(f);
    }
    let diffs: Vec<f64> = fields.windows(2).map(|w| max_gap(&w[0], &w[1])).collect();
    let sc = &cfg.scatter;
    let lambdas = lambda_grid(sc.lambda_points, sc.lambda_max);
    let k = sc.modes.first().map(|k| k.mode()).unwrap_or(ahrad_core::Mode::one(0));
    let p = probe(k, &sc.probe_f1, &sc.probe_f2);
    let gaps = grids
        .iter()
        .map(|g| compare_mode(&m, k, &lambdas, &p, g, sc.window).map(|s| s.gap))
        .collect::<Result<Vec<f64>>>()?;
    Ok(vec![
        Series::of_errors("field", deltas[..levels - 1].to_vec(), diffs),
        Series::of_errors("unitarity_defect", deltas.clone(), defects),
        Series::of_errors("scattering_agreement", deltas, gaps),
    ])
}

pub fn run(cfg: &RunConfig, hash: &str) -> Result<Outcome> {
    let series = study(cfg, cfg.convergence.levels)?;
    let mut rows = Vec::new();
    for s in &series {
        for (i, (&d, &v)) in s.delta.iter().zip(&s.value).enumerate() {
            rows.push(vec![
                s.quantity.to_string(),
                i.to_string(),
                sci(d),
                sci(v),
                s.order[i].map(sci).unwrap_or_default(),
            ]);
        }
    }
    let mut out = Outcome::default();
    out.artifacts.push(Artifact::csv("convergence.csv", &["quantity", "level", "delta", "value", "order"], rows)?);
    out.checks.push(Check::at_least("field_order", series[0].finest_order(), cfg.convergence.min_field_order));
    out.checks.push(Check::at_least(
        "unitarity_defect_order",
        series[1].finest_order(),
        cfg.convergence.min_defect_order,
    ));
    out.artifacts
        .push(Artifact::json("convergence.json", &serde_json::json!({ "config_hash": hash, "series": series }))?);
    Ok(out)
}

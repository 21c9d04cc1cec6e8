//! Forward radiation fields: unitarity, the 2‖f‖_E bound, finite speed, membership and the filter identity.

use ahrad_core::energy::{energy_norm, shifted_laplacian};
use ahrad_core::fields::{field_norm, forward_field, fourier_field_unchecked, lambda_grid, tail_ratio, RadiationField};
use ahrad_core::scattering::membership_mf;
use ahrad_core::{CauchyData, DataSpec, GridSpec, WarpedMetric};
use rayon::prelude::*;
use serde::Serialize;

use super::{indicial_check, unique_modes};
use crate::config::RunConfig;
use crate::data::data_sets;
use crate::error::{Context, Result};
use crate::output::{field_csv, fourier_csv, Artifact, Check, Outcome};

/// Frequencies of the polynomial-filter identity.
const FILTER_POINTS: usize = 33;
const FILTER_LAMBDA_MAX: f64 = 4.0;
/// Largest s-step of the filter transforms; the image field has sharper fronts.
const FILTER_DS: f64 = 1.25e-3;

/// Energy against field norm for one data set.
#[derive(Clone, Debug, Serialize)]
pub struct UnitarityRow {
    pub set: usize,
    pub energy: f64,
    pub field_norm_sq: f64,
    pub defect: f64,
    /// ‖R₊f‖ / (2‖f‖_E).
    pub bound_ratio: f64,
    /// Largest |F(s)| for s < log x₀.
    pub before_front: f64,
    /// ‖F − S F*‖/‖F‖ for the odd part.
    pub membership: Option<f64>,
    pub tail: f64,
}

/// Unitarity report of one data set, with its field.
pub fn unitarity_row(
    m: &WarpedMetric,
    d: &CauchyData,
    g: &GridSpec,
    set: usize,
) -> Result<(UnitarityRow, RadiationField)> {
    let e = energy_norm(m, d).context("energy norm")?;
    let f = forward_field(m, d, g).context("forward field")?;
    let n2 = field_norm(&f).powi(2);
    let x0 = d.support().map_or(f64::INFINITY, |s| s.0);
    let before_front = f
        .modes
        .iter()
        .flat_map(|fm| fm.values.iter().enumerate().filter(|(i, _)| f.s_at(*i) < x0.ln()).map(|(_, v)| v.norm()))
        .fold(0.0, f64::max);
    let odd = d.odd_part();
    let membership = if odd.support().is_some() {
        let fo = forward_field(m, &odd, g).context("forward field of the odd part")?;
        Some(membership_mf(m, &fo, g).context("membership residual")?)
    } else {
        None
    };
    let row = UnitarityRow {
        set,
        energy: e,
        field_norm_sq: n2,
        defect: if e > 0.0 { (n2 - e).abs() / e } else { 0.0 },
        bound_ratio: if e > 0.0 { n2.sqrt() / (2.0 * e.sqrt()) } else { 0.0 },
        before_front,
        membership,
        tail: tail_ratio(&f),
    };
    Ok((row, f))
}

/// Largest deviation of the transform of R₊(Pf) from λ² times that of R₊f, relative to its peak.
pub fn filter_identity(m: &WarpedMetric, d: &CauchyData, g: &GridSpec) -> Result<f64> {
    let g = &GridSpec { ds: g.ds.min(FILTER_DS), ..*g };
    let lambdas = lambda_grid(FILTER_POINTS, FILTER_LAMBDA_MAX);
    let pd = shifted_laplacian(m, d);
    let f = fourier_field_unchecked(&forward_field(m, d, g).context("forward field")?, &lambdas);
    let pf = fourier_field_unchecked(&forward_field(m, &pd, g).context("forward field of P f")?, &lambdas);
    let mut worst = 0.0f64;
    let mut scale = 0.0f64;
    for (a, b) in f.modes.iter().zip(&pf.modes) {
        for (i, &l) in lambdas.iter().enumerate() {
            worst = worst.max((b.values[i] - a.values[i] * (l * l)).norm());
            scale = scale.max(b.values[i].norm());
        }
    }
    Ok(if scale > 0.0 { worst / scale } else { 0.0 })
}

#[derive(Serialize)]
struct Report<'a> {
    config_hash: &'a str,
    sets: &'a [UnitarityRow],
    max_defect: f64,
    filter_identity: f64,
}

pub fn run(cfg: &RunConfig, hash: &str) -> Result<Outcome> {
    let m = cfg.metric()?;
    let g = cfg.grid_spec()?;
    let tol = &cfg.tolerances;
    let specs: Vec<DataSpec> = data_sets(cfg.data()?, cfg.seed)?;
    let lambdas = lambda_grid(cfg.fourier.points, cfg.fourier.lambda_max);
    let results: Vec<Result<(UnitarityRow, RadiationField)>> =
        specs.par_iter().enumerate().map(|(i, s)| unitarity_row(&m, &s.sample(&m, &g), &g, i)).collect();
    let mut rows = Vec::with_capacity(results.len());
    let mut out = Outcome::default();
    for r in results {
        let (row, f) = r?;
        out.artifacts.push(field_csv(format!("field_{}.csv", row.set), m.n, &f)?);
        out.artifacts.push(fourier_csv(
            format!("fourier_{}.csv", row.set),
            m.n,
            &fourier_field_unchecked(&f, &lambdas),
        )?);
        rows.push(row);
    }
    let filter = filter_identity(&m, &specs[0].sample(&m, &g), &g)?;
    let max = |f: fn(&UnitarityRow) -> f64| rows.iter().map(f).fold(0.0, f64::max);
    let max_defect = max(|r| r.defect);
    out.checks.push(Check::at_most("unitarity_defect", max_defect, tol.unitarity));
    out.checks.push(Check::at_most("field_bound", max(|r| r.bound_ratio), 1.0 + tol.bound));
    out.checks.push(Check::at_most("finite_speed", max(|r| r.before_front), tol.finite_speed));
    out.checks.push(Check::at_most("membership_mf", max(|r| r.membership.unwrap_or(0.0)), tol.membership));
    out.checks.push(Check::at_most("tail_decay", max(|r| r.tail), tol.tail));
    out.checks.push(Check::at_most("filter_identity", filter, tol.filter));
    let modes = unique_modes(specs.iter().flat_map(|s| s.mode_list()));
    out.checks.push(indicial_check(&m, &modes, tol.indicial));
    let report = Report { config_hash: hash, sets: &rows, max_defect, filter_identity: filter };
    out.artifacts.push(Artifact::json("unitarity.json", &report)?);
    Ok(out)
}

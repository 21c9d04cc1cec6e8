//! Cauchy evolution against translation of the radiation field, with a mode-field dump.

use ahrad_core::fields::{evolve_cauchy, forward_field, translate, RadiationField};
use ahrad_core::goursat::{diagonal_data, solve_forward, ModeProblem};
use ahrad_core::{CauchyData, GridSpec, Parity, WarpedMetric};
use rayon::prelude::*;

use super::{indicial_check, unique_modes};
use crate::config::RunConfig;
use crate::data::data_sets;
use crate::error::{Context, Result};
use crate::output::{mode_field_csv, mode_label, sci, Artifact, Check, Outcome};

/// max_s |R₊(W(τ)d)(s) − R₊d(s + τ)| over s ≤ s_max − τ, relative to max |R₊d|.
pub fn translation_mismatch(
    m: &WarpedMetric,
    d: &CauchyData,
    g: &GridSpec,
    f: &RadiationField,
    tau: f64,
) -> Result<f64> {
    let moved = forward_field(m, &evolve_cauchy(m, d, g, tau).context("Cauchy evolution")?, g)
        .context("forward field of evolved data")?;
    let shifted = translate(f, tau);
    let limit = g.s_max - tau.max(0.0);
    let mut worst = 0.0f64;
    for (a, b) in moved.modes.iter().zip(&shifted.modes) {
        for (i, (u, v)) in a.values.iter().zip(&b.values).enumerate() {
            if g.s_at(i) <= limit {
                worst = worst.max((u - v).norm());
            }
        }
    }
    let peak = f.max_abs();
    Ok(if peak > 0.0 { worst / peak } else { 0.0 })
}

pub fn run(cfg: &RunConfig, _hash: &str) -> Result<Outcome> {
    let m = cfg.metric()?;
    let g = cfg.grid_spec()?;
    let tol = &cfg.tolerances;
    let specs = data_sets(cfg.data()?, cfg.seed)?;
    let mut out = Outcome::default();
    let mut rows = Vec::new();
    let mut worst = 0.0f64;
    for (i, spec) in specs.iter().enumerate() {
        let d = spec.sample(&m, &g);
        let f = forward_field(&m, &d, &g).context("forward field")?;
        let mismatches: Vec<Result<f64>> =
            cfg.evolve.tau.par_iter().map(|&tau| translation_mismatch(&m, &d, &g, &f, tau)).collect();
        for (&tau, r) in cfg.evolve.tau.iter().zip(mismatches) {
            let r = r?;
            worst = worst.max(r);
            rows.push(vec![i.to_string(), sci(tau), sci(r), sci(tol.translation)]);
        }
    }
    out.artifacts.push(Artifact::csv("translation.csv", &["set", "tau", "mismatch", "limit"], rows)?);
    out.checks.push(Check::at_most("translation", worst, tol.translation));

    let dump = GridSpec { t_max: g.t_max.min(cfg.evolve.dump_t_max), ..g };
    let d = specs[0].sample(&m, &dump);
    for md in &d.modes {
        let p = ModeProblem::assemble(&m, md.mode, &dump);
        for (parity, tag) in [(Parity::Even, "even"), (Parity::Odd, "odd")] {
            let data = diagonal_data(&m, &d, md.mode, &dump, parity).context("diagonal data")?;
            let w = solve_forward(&p, &data, parity).context("Goursat march")?;
            let name = format!("mode_field_k{}_{tag}.csv", mode_label(m.n, md.mode).replace(':', "_"));
            out.artifacts.push(mode_field_csv(name, &w, cfg.evolve.dump_stride)?);
        }
    }
    let modes = unique_modes(specs.iter().flat_map(|s| s.mode_list()));
    out.checks.push(indicial_check(&m, &modes, tol.indicial));
    Ok(out)
}

//! Energy of Cauchy data and the shifted Laplacian acting on data.

use alloc::vec::Vec;
use num_traits::Float;

use crate::error::{Error, Result};
use crate::grid::{CauchyData, ModeData};
use crate::math::C64;
use crate::metric::WarpedMetric;

/// Largest relative change of [`energy_norm`] under coarsening by two.
pub const ENERGY_QUADRATURE_TOL: f64 = 1e-3;

fn mu_derivative(v: &[C64], h: f64, a: usize) -> C64 {
    let n = v.len();
    if n < 3 {
        return C64::new(0.0, 0.0);
    }
    if a == 0 {
        (v[1] - v[0]) / h
    } else if a + 1 == n {
        (v[n - 1] - v[n - 2]) / h
    } else if a >= 3 && a + 3 < n {
        (v[a + 3] - v[a - 3] - (v[a + 2] - v[a - 2]) * 9.0 + (v[a + 1] - v[a - 1]) * 45.0) / (60.0 * h)
    } else if a >= 2 && a + 2 < n {
        (v[a - 2] - v[a - 1] * 8.0 + v[a + 1] * 8.0 - v[a + 2]) / (12.0 * h)
    } else {
        (v[a + 1] - v[a - 1]) / (2.0 * h)
    }
}

fn energy_with_stride(m: &WarpedMetric, d: &CauchyData, stride: usize) -> f64 {
    let nf = m.n as f64;
    let h = d.delta * stride as f64;
    let mut total = 0.0;
    for md in &d.modes {
        let f1: Vec<C64> = md.f1.iter().step_by(stride).copied().collect();
        let f2: Vec<C64> = md.f2.iter().step_by(stride).copied().collect();
        let vals: Vec<f64> = (0..f1.len())
            .map(|a| {
                if a == 0 {
                    return 0.0;
                }
                let mu = a as f64 * h;
                let x = mu * mu;
                let dx = mu_derivative(&f1, h, a) / (2.0 * mu);
                let dens = x * x * dx.norm_sqr()
                    + (x * x * m.mode_frequency_sq(md.mode, x) - 0.25 * nf * nf) * f1[a].norm_sqr()
                    + f2[a].norm_sqr();
                let vol = m.warp(x).powi(m.n as i32) * x.powf(-nf - 1.0);
                dens * vol * 2.0 * mu
            })
            .collect();
        total += 0.5 * crate::math::trapezoid(&vals, h);
    }
    total * m.boundary_measure()
}

/// ‖d‖²_E = ½∫(|df₁|²_g − (n²/4)|f₁|² + |f₂|²) dvol_g, summed over modes.
///
/// Negative values are returned as computed.
pub fn energy_norm(m: &WarpedMetric, d: &CauchyData) -> Result<f64> {
    let fine = energy_with_stride(m, d, 1);
    let coarse = energy_with_stride(m, d, 2);
    let change = (fine - coarse).abs() / fine.abs().max(1e-300);
    if fine != 0.0 && change > ENERGY_QUADRATURE_TOL {
        return Err(Error::QuadratureUnresolved { change });
    }
    Ok(fine)
}

/// (Δ_g − n²/4) applied to both components of the data, mode by mode.
///
/// With θ = x∂ₓ = (μ/2)∂_μ the operator reads −θ² + nθ − xAθ + x²ω² − n²/4.
pub fn shifted_laplacian(m: &WarpedMetric, d: &CauchyData) -> CauchyData {
    let nf = m.n as f64;
    let h = d.delta;
    let apply = |k, v: &[C64]| -> Vec<C64> {
        let n = v.len();
        (0..n)
            .map(|a| {
                if a == 0 || a + 1 == n {
                    return C64::new(0.0, 0.0);
                }
                let mu = a as f64 * h;
                let x = mu * mu;
                let fm = (v[a + 1] - v[a - 1]) / (2.0 * h);
                let fmm = (v[a + 1] - v[a] * 2.0 + v[a - 1]) / (h * h);
                let theta = fm * (0.5 * mu);
                let theta2 = fmm * (0.25 * mu * mu) + fm * (0.25 * mu);
                -theta2
                    + theta * (nf - x * m.mean_curvature(x))
                    + v[a] * (x * x * m.mode_frequency_sq(k, x) - 0.25 * nf * nf)
            })
            .collect()
    };
    CauchyData {
        delta: d.delta,
        modes: d
            .modes
            .iter()
            .map(|md| ModeData { mode: md.mode, f1: apply(md.mode, &md.f1), f2: apply(md.mode, &md.f2) })
            .collect(),
    }
}

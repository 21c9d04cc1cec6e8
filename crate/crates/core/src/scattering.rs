//! The scattering operator S = R₊ ∘ R₋⁻¹ and its per-mode multiplier a_k(λ).
//!
//! The dynamic multiplier is the ratio of Fourier transforms of the forward and
//! backward fields of one probe; the stationary one comes from [`crate::radial`].

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::fields::{
    backward_field, field_norm, forward_field, forward_field_raw, fourier_field, inverse_forward_field,
    inverse_forward_field_full, relative_distance, FieldKind, RadiationField,
};
use crate::grid::{CauchyData, GridSpec};
use crate::math::C64;
use crate::metric::{Mode, WarpedMetric};
use crate::par;
use crate::radial::scattering_matrix_stationary;

/// Relative floor on |F̂₋| below which λ samples are masked.
pub const PROBE_FLOOR: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Dynamic,
    Stationary,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Dynamic => "dynamic",
            Method::Stationary => "stationary",
        }
    }
}

/// a_k(λ) on a λ grid. Masked samples hold NaN.
#[derive(Clone, Debug, PartialEq)]
pub struct ScatteringSample {
    pub mode: Mode,
    pub lambdas: Vec<f64>,
    pub a: Vec<C64>,
    pub masked: Vec<bool>,
    pub method: Method,
    pub probe: Option<String>,
}

impl ScatteringSample {
    /// Largest ||a| − 1| over unmasked samples.
    pub fn unitarity_defect(&self) -> f64 {
        self.unmasked().map(|(_, a)| (a.norm() - 1.0).abs()).fold(0.0, f64::max)
    }

    /// (λ, a) pairs that are not masked.
    pub fn unmasked(&self) -> impl Iterator<Item = (f64, C64)> + '_ {
        self.lambdas.iter().zip(&self.a).zip(&self.masked).filter(|(_, &m)| !m).map(|((&l, &a), _)| (l, a))
    }

    /// Largest |a − b|/|b| over samples unmasked in both, restricted to λ ∈ [lo, hi].
    pub fn max_relative_gap(&self, other: &ScatteringSample, lo: f64, hi: f64) -> Result<f64> {
        if self.lambdas.len() != other.lambdas.len()
            || self.lambdas.iter().zip(&other.lambdas).any(|(a, b)| (a - b).abs() > 1e-12)
        {
            return Err(Error::GridMismatch(String::from("scattering samples on different lambda grids")));
        }
        let mut worst: f64 = 0.0;
        for i in 0..self.lambdas.len() {
            let l = self.lambdas[i];
            if self.masked[i] || other.masked[i] || l < lo || l > hi {
                continue;
            }
            worst = worst.max((self.a[i] - other.a[i]).norm() / other.a[i].norm());
        }
        Ok(worst)
    }
}

/// S F for F in M^b, through the odd inverse: F = R₋(0, f) ⇒ F* = R₊(0, f).
pub fn scattering_apply(m: &WarpedMetric, f: &RadiationField, grid: &GridSpec) -> Result<RadiationField> {
    let data = inverse_backward_odd(m, f, grid)?;
    forward_field_raw(m, &data, grid)
}

/// Data (0, f) with R₋(0, f) ≈ F.
pub fn inverse_backward_odd(m: &WarpedMetric, f: &RadiationField, grid: &GridSpec) -> Result<CauchyData> {
    inverse_forward_field(m, &f.reflected()?, grid)
}

/// Data d with R₋d ≈ F for general F, via R₋(f₁, f₂)(s) = R₊(−f₁, f₂)(−s).
pub fn inverse_backward_full(m: &WarpedMetric, f: &RadiationField, grid: &GridSpec) -> Result<CauchyData> {
    Ok(inverse_forward_field_full(m, &f.reflected()?, grid)?.time_reversed())
}

/// S F for an arbitrary field, through the full inverse.
pub fn scattering_apply_full(m: &WarpedMetric, f: &RadiationField, grid: &GridSpec) -> Result<RadiationField> {
    let data = inverse_backward_full(m, f, grid)?;
    let mut out = forward_field_raw(m, &data, grid)?;
    out.kind = FieldKind::Derived;
    Ok(out)
}

/// ‖F − S F*‖/‖F‖; small for F in M^f.
pub fn membership_mf(m: &WarpedMetric, f: &RadiationField, grid: &GridSpec) -> Result<f64> {
    if field_norm(f) == 0.0 {
        return Ok(0.0);
    }
    let sf = scattering_apply_full(m, &f.reflected()?, grid)?;
    relative_distance(&sf, f)
}

/// ‖F* − S F‖/‖F‖; small for F in M^b.
pub fn membership_mb(m: &WarpedMetric, f: &RadiationField, grid: &GridSpec) -> Result<f64> {
    if field_norm(f) == 0.0 {
        return Ok(0.0);
    }
    let sf = scattering_apply_full(m, f, grid)?;
    relative_distance(&sf, &f.reflected()?)
}

/// a_k(λ) = F̂₊(λ)/F̂₋(λ) for the mode-k part of `probe`.
pub fn scattering_matrix_dynamic(
    m: &WarpedMetric,
    k: Mode,
    lambdas: &[f64],
    probe: &CauchyData,
    grid: &GridSpec,
) -> Result<ScatteringSample> {
    let md = probe.mode(k).ok_or(Error::ProbeDeficient { k: k.0 })?;
    let single = CauchyData { delta: probe.delta, modes: alloc::vec![md.clone()] };
    let plus = forward_field(m, &single, grid)?;
    let minus = backward_field(m, &single, grid)?;
    let fp = fourier_field(&plus, lambdas)?;
    let fm = fourier_field(&minus, lambdas)?;
    let (fp, fm) = (fp.mode(k).unwrap_or(&[]), fm.mode(k).unwrap_or(&[]));
    let peak = fm.iter().fold(0.0f64, |a, v| a.max(v.norm()));
    let mut a = Vec::with_capacity(lambdas.len());
    let mut masked = Vec::with_capacity(lambdas.len());
    for (p, q) in fp.iter().zip(fm) {
        let off = peak == 0.0 || q.norm() < PROBE_FLOOR * peak;
        masked.push(off);
        a.push(if off { C64::new(f64::NAN, f64::NAN) } else { p / q });
    }
    if masked.iter().all(|&x| x) {
        return Err(Error::ProbeDeficient { k: k.0 });
    }
    let support = probe.support().unwrap_or((0.0, 0.0));
    Ok(ScatteringSample {
        mode: k,
        lambdas: lambdas.to_vec(),
        a,
        masked,
        method: Method::Dynamic,
        probe: Some(format!("mode {:?}, support [{:.6}, {:.6}]", k.0, support.0, support.1)),
    })
}

/// Stationary a_k(λ) on a λ grid; λ = 0 is masked.
pub fn scattering_sample_stationary(m: &WarpedMetric, k: Mode, lambdas: &[f64]) -> Result<ScatteringSample> {
    let vals =
        par::map(lambdas, |&l| if l == 0.0 { Ok(None) } else { scattering_matrix_stationary(m, k, l).map(Some) });
    let mut a = Vec::with_capacity(lambdas.len());
    let mut masked = Vec::with_capacity(lambdas.len());
    for v in vals {
        match v? {
            Some(x) => {
                a.push(x);
                masked.push(false);
            }
            None => {
                a.push(C64::new(f64::NAN, f64::NAN));
                masked.push(true);
            }
        }
    }
    Ok(ScatteringSample { mode: k, lambdas: lambdas.to_vec(), a, masked, method: Method::Stationary, probe: None })
}

#[cfg(test)]
mod tests;

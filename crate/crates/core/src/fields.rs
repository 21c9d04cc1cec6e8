//! Forward and backward radiation fields, their inverses, and field-side utilities.
//!
//! On mode k the forward field is F(s) = ½ |h|^{-1/4}(0) t′∂ₜ'W(0, t′) at t′ = e^{s/2}.
//! It is formed at the half nodes t′ = (b + ½)Δ of the boundary row, where
//! F = ½ t′ (W_{b+1} − W_b)/Δ inverts exactly, and resampled to the s-grid.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use num_traits::Float;

use crate::error::{Error, Result};
use crate::goursat::{
    cauchy_from_diagonal, diagonal_lines, march_forward, sample_interior, solve_forward, solve_from_boundary,
    solve_inward, DiagonalData, ModeProblem, Parity,
};
use crate::grid::{CauchyData, GridSpec, ModeData};
use crate::math::{extrap_uniform6, interp_uniform, interp_uniform6, smooth_bump, trapezoid, C64};
use crate::metric::{Mode, WarpedMetric};
use crate::par;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Relative round-trip residual allowed by [`inverse_forward_field`], in units of Δ².
pub const RANGE_TOL_DELTA_SQ: f64 = 20.0;
/// Largest edge-to-peak ratio accepted by [`fourier_field`].
pub const TAIL_TOL: f64 = 1e-6;

/// Provenance of a field.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldKind {
    Forward,
    Backward,
    Derived,
}

/// Samples F_k(s) on one mode.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldMode {
    pub mode: Mode,
    pub values: Vec<C64>,
}

/// Radiation field samples on a uniform s-grid, mode by mode.
#[derive(Clone, Debug, PartialEq)]
pub struct RadiationField {
    pub s_min: f64,
    pub ds: f64,
    /// Boundary measure Lⁿ.
    pub measure: f64,
    pub kind: FieldKind,
    pub modes: Vec<FieldMode>,
}

impl RadiationField {
    pub fn zero(m: &WarpedMetric, grid: &GridSpec, modes: &[Mode], kind: FieldKind) -> Self {
        RadiationField {
            s_min: grid.s_min,
            ds: grid.ds,
            measure: m.boundary_measure(),
            kind,
            modes: modes.iter().map(|&mode| FieldMode { mode, values: vec![ZERO; grid.s_len()] }).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.modes.first().map(|f| f.values.len()).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn s_at(&self, i: usize) -> f64 {
        self.s_min + i as f64 * self.ds
    }

    pub fn s_max(&self) -> f64 {
        self.s_at(self.len().saturating_sub(1))
    }

    pub fn mode(&self, k: Mode) -> Option<&[C64]> {
        self.modes.iter().find(|f| f.mode == k).map(|f| f.values.as_slice())
    }

    pub fn mode_list(&self) -> Vec<Mode> {
        self.modes.iter().map(|f| f.mode).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.modes.iter().flat_map(|f| f.values.iter()).fold(0.0, |m, v| m.max(v.norm()))
    }

    /// Value on mode k at arbitrary s by cubic interpolation; zero outside the window.
    pub fn eval(&self, k: Mode, s: f64) -> C64 {
        self.mode(k).map(|v| interp_uniform(v, self.s_min, self.ds, s)).unwrap_or(ZERO)
    }

    pub fn map_values(&self, kind: FieldKind, f: impl Fn(Mode, &[C64]) -> Vec<C64>) -> Self {
        RadiationField {
            modes: self.modes.iter().map(|fm| FieldMode { mode: fm.mode, values: f(fm.mode, &fm.values) }).collect(),
            kind,
            ..*self
        }
    }

    pub fn scaled(&self, c: C64) -> Self {
        self.map_values(self.kind, |_, v| v.iter().map(|x| x * c).collect())
    }

    fn check_compatible(&self, other: &RadiationField) -> Result<()> {
        if self.len() != other.len()
            || (self.ds - other.ds).abs() > 1e-12 * self.ds
            || (self.s_min - other.s_min).abs() > 1e-9 * self.ds
        {
            return Err(Error::GridMismatch(format!(
                "fields on different s-grids ({}, {}, {}) vs ({}, {}, {})",
                self.s_min,
                self.ds,
                self.len(),
                other.s_min,
                other.ds,
                other.len()
            )));
        }
        Ok(())
    }

    /// self + c·other on the union of modes.
    pub fn axpy(&self, c: C64, other: &RadiationField) -> Result<Self> {
        if self.modes.is_empty() {
            return Ok(other.scaled(c));
        }
        if !other.modes.is_empty() {
            self.check_compatible(other)?;
        }
        let mut out = self.clone();
        out.kind = FieldKind::Derived;
        for fm in &other.modes {
            match out.modes.iter_mut().find(|g| g.mode == fm.mode) {
                Some(g) => g.values.iter_mut().zip(&fm.values).for_each(|(a, b)| *a += b * c),
                None => out.modes.push(FieldMode { mode: fm.mode, values: fm.values.iter().map(|v| v * c).collect() }),
            }
        }
        Ok(out)
    }

    /// F*(s) = F(−s). Requires an s-grid symmetric about 0.
    pub fn reflected(&self) -> Result<Self> {
        let s_max = self.s_max();
        if (self.s_min + s_max).abs() > 1e-9 * self.ds.max(1.0) {
            return Err(Error::GridMismatch(format!(
                "reflection needs a symmetric window, got [{}, {}]",
                self.s_min, s_max
            )));
        }
        let kind = match self.kind {
            FieldKind::Forward => FieldKind::Backward,
            FieldKind::Backward => FieldKind::Forward,
            FieldKind::Derived => FieldKind::Derived,
        };
        Ok(self.map_values(kind, |_, v| v.iter().rev().copied().collect()))
    }
}

/// Half-node field values F_{b+½} from a boundary row.
pub fn half_nodes_from_row(row: &[C64], delta: f64, phi0: f64) -> Vec<C64> {
    row.windows(2)
        .enumerate()
        .map(|(b, w)| {
            let tp = (b as f64 + 0.5) * delta;
            (w[1] - w[0]) * (0.5 * tp / (delta * phi0))
        })
        .collect()
}

/// Boundary row with W(0, 0) = 0 from half-node field values.
pub fn row_from_half_nodes(half: &[C64], delta: f64, phi0: f64) -> Vec<C64> {
    let mut row = Vec::with_capacity(half.len() + 1);
    row.push(ZERO);
    let mut w = ZERO;
    for (b, f) in half.iter().enumerate() {
        let tp = (b as f64 + 0.5) * delta;
        w += f * (2.0 * delta * phi0 / tp);
        row.push(w);
    }
    row
}

/// Relative size of the first data sample above which a support edge is a cut.
pub const CUT_RATIO: f64 = 1e-3;

/// Leading edge of the data seen by the resampling.
#[derive(Clone, Copy, Debug, PartialEq)]
enum Front {
    /// No data.
    Empty,
    /// Data rising smoothly from node `a`: the field vanishes for t′ < aΔ.
    Smooth(usize),
    /// Data cut at the cell boundary (a − ½)Δ.
    Cut(usize),
}

fn mode_front(md: &ModeData, first: Option<usize>) -> Front {
    let Some(a) = first else {
        return Front::Empty;
    };
    let peak = md.f1.iter().chain(md.f2.iter()).fold(0.0f64, |acc, v| acc.max(v.norm()));
    let edge = md.f1.get(a).map_or(0.0, |v| v.norm()).max(md.f2.get(a).map_or(0.0, |v| v.norm()));
    if a > 0 && edge >= CUT_RATIO * peak {
        Front::Cut(a)
    } else {
        Front::Smooth(a)
    }
}

/// Resamples half-node values to the s-grid.
///
/// Below a smooth front the field vanishes. At a cut it vanishes below the cell
/// boundary and is taken from the half nodes above it only, extrapolated linearly
/// over the first half cell, so the jump stays sharp.
fn half_nodes_to_s(half: &[C64], delta: f64, grid: &GridSpec, front: Front) -> Vec<C64> {
    let len = half.len();
    let t_at = |i: usize| (0.5 * grid.s_at(i)).exp();
    match front {
        Front::Empty => vec![ZERO; grid.s_len()],
        Front::Smooth(a) => (0..grid.s_len())
            .map(|i| {
                let tp = t_at(i);
                let u = tp / delta - 0.5;
                if tp < a as f64 * delta || len < 6 || u < 0.0 {
                    return ZERO;
                }
                interp_uniform6(half, 0.0, 1.0, u.min((len - 1) as f64))
            })
            .collect(),
        Front::Cut(a) => {
            let upper = &half[a.min(len)..];
            (0..grid.s_len())
                .map(|i| {
                    let u = t_at(i) / delta - 0.5;
                    if u < a as f64 - 1.0 || upper.len() < 6 {
                        return ZERO;
                    }
                    let r = u - a as f64;
                    if r < 0.0 {
                        return upper[0] + (upper[1] - upper[0]) * r;
                    }
                    interp_uniform6(upper, a as f64, 1.0, u.min((len - 1) as f64))
                })
                .collect()
        }
    }
}

/// Half-node values F((b + ½)Δ) for b < `count`, interpolated from s-samples.
///
/// When the first nonzero sample is a cut, half nodes below it vanish, the first
/// half node past the last zero sample carries the half cell the march assigns to a
/// cut, and the rest use stencils from the nonzero side only.
fn s_to_half_nodes(values: &[C64], s_min: f64, ds: f64, delta: f64, count: usize) -> Vec<C64> {
    let centered = || -> Vec<C64> {
        (0..count).map(|b| interp_uniform6(values, s_min, ds, 2.0 * ((b as f64 + 0.5) * delta).ln())).collect()
    };
    let Some(i0) = values.iter().position(|v| *v != ZERO) else {
        return vec![ZERO; count];
    };
    let peak = values.iter().fold(0.0f64, |acc, v| acc.max(v.norm()));
    if i0 == 0 || values[i0].norm() < CUT_RATIO * peak {
        return centered();
    }
    let t_lo = (0.5 * (s_min + (i0 - 1) as f64 * ds)).exp();
    let upper = &values[i0..];
    let x0 = s_min + i0 as f64 * ds;
    let mut jump_seen = false;
    (0..count)
        .map(|b| {
            let tp = (b as f64 + 0.5) * delta;
            if tp <= t_lo {
                return ZERO;
            }
            if jump_seen {
                return extrap_uniform6(upper, x0, ds, 2.0 * tp.ln());
            }
            jump_seen = true;
            let node = tp + 0.5 * delta;
            extrap_uniform6(upper, x0, ds, 2.0 * node.ln()) * (0.5 * tp / node)
        })
        .collect()
}

fn check_grid(m: &WarpedMetric, d: &CauchyData, grid: &GridSpec) -> Result<()> {
    grid.validate(m)?;
    if (d.delta - grid.delta).abs() > 1e-15 * grid.delta && !d.modes.is_empty() {
        return Err(Error::GridMismatch(format!("data step {} vs grid step {}", d.delta, grid.delta)));
    }
    Ok(())
}

fn forward_unchecked(m: &WarpedMetric, d: &CauchyData, grid: &GridSpec) -> Result<RadiationField> {
    let len = grid.last_diagonal(m) + 1;
    let first = d.first_support_node();
    let phi0 = m.quarter_det(0.0);
    let modes = par::map(&d.modes, |md| -> Result<FieldMode> {
        let p = ModeProblem::assemble(m, md.mode, grid);
        let diag = diagonal_lines(m, md, len, grid.delta);
        let mut row = Vec::with_capacity(p.columns + 1);
        march_forward(&p, &diag, |_, col| row.push(col[0]))?;
        let half = half_nodes_from_row(&row, grid.delta, phi0);
        Ok(FieldMode { mode: md.mode, values: half_nodes_to_s(&half, grid.delta, grid, mode_front(md, first)) })
    });
    Ok(RadiationField {
        s_min: grid.s_min,
        ds: grid.ds,
        measure: m.boundary_measure(),
        kind: FieldKind::Forward,
        modes: modes.into_iter().collect::<Result<Vec<_>>>()?,
    })
}

/// Forward radiation field R₊(f₁, f₂) on the s-window of `grid`.
pub fn forward_field(m: &WarpedMetric, d: &CauchyData, grid: &GridSpec) -> Result<RadiationField> {
    check_grid(m, d, grid)?;
    d.check_support(m, grid)?;
    forward_unchecked(m, d, grid)
}

/// Forward field without the support checks, for data produced by the inverses.
pub fn forward_field_raw(m: &WarpedMetric, d: &CauchyData, grid: &GridSpec) -> Result<RadiationField> {
    check_grid(m, d, grid)?;
    forward_unchecked(m, d, grid)
}

/// Backward radiation field R₋(f₁, f₂)(s) = R₊(−f₁, f₂)(−s).
pub fn backward_field(m: &WarpedMetric, d: &CauchyData, grid: &GridSpec) -> Result<RadiationField> {
    let mut f = forward_field(m, &d.time_reversed(), grid)?.reflected()?;
    f.kind = FieldKind::Backward;
    Ok(f)
}

/// Relative L² distance ‖a − b‖/‖b‖ (0 when both vanish).
pub fn relative_distance(a: &RadiationField, b: &RadiationField) -> Result<f64> {
    let diff = a.axpy(C64::new(-1.0, 0.0), b)?;
    let nb = field_norm(b);
    let nd = field_norm(&diff);
    if nb == 0.0 {
        return Ok(if nd == 0.0 { 0.0 } else { f64::INFINITY });
    }
    Ok(nd / nb)
}

fn field_grid_check(f: &RadiationField, grid: &GridSpec) -> Result<()> {
    if (f.ds - grid.ds).abs() > 1e-12 * grid.ds || (f.s_min - grid.s_min).abs() > 1e-9 * grid.ds {
        return Err(Error::GridMismatch(format!(
            "field window ({}, {}) vs grid ({}, {})",
            f.s_min, f.ds, grid.s_min, grid.ds
        )));
    }
    Ok(())
}

/// Data (0, f) with R₊(0, f) ≈ F, together with the relative round-trip residual.
pub fn inverse_forward_field_residual(
    m: &WarpedMetric,
    f: &RadiationField,
    grid: &GridSpec,
) -> Result<(CauchyData, f64)> {
    grid.validate(m)?;
    field_grid_check(f, grid)?;
    let phi0 = m.quarter_det(0.0);
    let modes = par::map(&f.modes, |fm| -> Result<ModeData> {
        let p = ModeProblem::assemble(m, fm.mode, grid);
        let nb = p.last_diagonal().min(p.columns);
        let half = s_to_half_nodes(&fm.values, f.s_min, f.ds, grid.delta, nb);
        let row = row_from_half_nodes(&half, grid.delta, phi0);
        let (_, diag) = solve_inward(&p, &row, Parity::Odd)?;
        let f2 = cauchy_from_diagonal(m, &diag, grid.delta, Parity::Odd);
        Ok(ModeData { mode: fm.mode, f1: vec![ZERO; f2.len()], f2 })
    });
    let d = CauchyData { delta: grid.delta, modes: modes.into_iter().collect::<Result<Vec<_>>>()? };
    let back = forward_unchecked(m, &d, grid)?;
    let residual = relative_distance(&back, f)?;
    Ok((d, residual))
}

/// Inverse of the forward field on data of the form (0, f).
///
/// Fails with `NotInRange` when the round trip misses F by more than 20Δ² relative.
pub fn inverse_forward_field(m: &WarpedMetric, f: &RadiationField, grid: &GridSpec) -> Result<CauchyData> {
    let (d, residual) = inverse_forward_field_residual(m, f, grid)?;
    let threshold = RANGE_TOL_DELTA_SQ * grid.delta * grid.delta;
    if residual > threshold {
        return Err(Error::NotInRange { residual, threshold });
    }
    Ok(d)
}

/// Full inverse of the forward field: both f₁ and f₂ from the boundary row,
/// marched back against the cap. The field is taken to vanish beyond the window.
pub fn inverse_forward_field_full(m: &WarpedMetric, f: &RadiationField, grid: &GridSpec) -> Result<CauchyData> {
    grid.validate(m)?;
    field_grid_check(f, grid)?;
    let phi0 = m.quarter_det(0.0);
    let modes = par::map(&f.modes, |fm| -> Result<ModeData> {
        let p = ModeProblem::assemble(m, fm.mode, grid);
        let half = s_to_half_nodes(&fm.values, f.s_min, f.ds, grid.delta, p.columns);
        let row = row_from_half_nodes(&half, grid.delta, phi0);
        let last = row.len() - 1;
        let diag: DiagonalData = solve_from_boundary(&p, |b| row[b.min(last)])?;
        Ok(ModeData {
            mode: fm.mode,
            f1: cauchy_from_diagonal(m, &diag, grid.delta, Parity::Even),
            f2: cauchy_from_diagonal(m, &diag, grid.delta, Parity::Odd),
        })
    });
    Ok(CauchyData { delta: grid.delta, modes: modes.into_iter().collect::<Result<Vec<_>>>()? })
}

/// Cauchy data (u(τ), ∂ₜu(τ)) of the solution with data `d`.
pub fn evolve_cauchy(m: &WarpedMetric, d: &CauchyData, grid: &GridSpec, tau: f64) -> Result<CauchyData> {
    check_grid(m, d, grid)?;
    d.check_support(m, grid)?;
    let reach = m.x_max.sqrt() * (0.5 * tau.abs()).exp() + 6.0 * grid.delta;
    let local = GridSpec { t_max: grid.t_max.min(reach), ..*grid };
    let len = grid.last_diagonal(m) + 1;
    let modes = par::map(&d.modes, |md| -> Result<ModeData> {
        let p = ModeProblem::assemble(m, md.mode, &local);
        let lines = diagonal_lines(m, md, len, grid.delta);
        let odd = DiagonalData { d: vec![ZERO; len], n: lines.n.clone() };
        let even = DiagonalData { d: lines.d, n: vec![ZERO; len] };
        let fo = solve_forward(&p, &odd, Parity::Odd)?;
        let fe = solve_forward(&p, &even, Parity::Even)?;
        let mut f1 = vec![ZERO; len];
        let mut f2 = vec![ZERO; len];
        for a in 1..len {
            let (u, ut) = sample_interior(&[&fe, &fo], m, tau, d.x_at(a))?;
            f1[a] = u;
            f2[a] = ut;
        }
        Ok(ModeData { mode: md.mode, f1, f2 })
    });
    Ok(CauchyData { delta: d.delta, modes: modes.into_iter().collect::<Result<Vec<_>>>()? })
}

/// G(s) = F(s + τ), zero where s + τ leaves the window.
pub fn translate(f: &RadiationField, tau: f64) -> RadiationField {
    let shift = tau / f.ds;
    let whole = shift.round();
    let mut out = f.map_values(FieldKind::Derived, |_, v| {
        let n = v.len() as isize;
        (0..n)
            .map(|i| {
                if (shift - whole).abs() < 1e-9 {
                    let j = i + whole as isize;
                    if j >= 0 && j < n {
                        v[j as usize]
                    } else {
                        ZERO
                    }
                } else {
                    interp_uniform6(v, 0.0, 1.0, i as f64 + shift)
                }
            })
            .collect()
    });
    out.kind = f.kind;
    out
}

/// Even smoothing window φ sampled at s = j·ds, |j| ≤ half_len.
#[derive(Clone, Debug, PartialEq)]
pub struct Window {
    pub ds: f64,
    pub half_len: usize,
    pub values: Vec<f64>,
}

impl Window {
    /// Normalized smooth bump of half-width `eps` (∫φ ds = 1).
    pub fn mollifier(eps: f64, ds: f64) -> Self {
        let half_len = (eps / ds).ceil() as usize;
        let mut values: Vec<f64> =
            (0..=2 * half_len).map(|i| smooth_bump((i as f64 - half_len as f64) * ds, 0.0, eps)).collect();
        let total: f64 = values.iter().sum::<f64>() * ds;
        values.iter_mut().for_each(|v| *v /= total);
        Window { ds, half_len, values }
    }

    /// Half-width of the support.
    pub fn radius(&self) -> f64 {
        self.half_len as f64 * self.ds
    }

    /// φ̂(λ) = Σ φ(s_j) e^{iλs_j} ds, real for an even window.
    pub fn transform(&self, lambda: f64) -> f64 {
        self.values
            .iter()
            .enumerate()
            .map(|(i, v)| v * (lambda * (i as f64 - self.half_len as f64) * self.ds).cos())
            .sum::<f64>()
            * self.ds
    }
}

/// (φ ∗ F)(s) per mode.
pub fn convolve_s(f: &RadiationField, w: &Window) -> Result<RadiationField> {
    if (w.ds - f.ds).abs() > 1e-12 * f.ds {
        return Err(Error::GridMismatch(format!("window step {} vs field step {}", w.ds, f.ds)));
    }
    let h = w.half_len as isize;
    let mut out = f.map_values(FieldKind::Derived, |_, v| {
        let n = v.len() as isize;
        (0..n)
            .map(|i| {
                let mut acc = ZERO;
                for (j, phi) in w.values.iter().enumerate() {
                    let src = i - (j as isize - h);
                    if src >= 0 && src < n {
                        acc += v[src as usize] * *phi;
                    }
                }
                acc * f.ds
            })
            .collect()
    });
    out.kind = f.kind;
    Ok(out)
}

/// ‖F‖ with ‖F‖² = Σ_k ∫|F_k|² ds · Lⁿ.
pub fn field_norm(f: &RadiationField) -> f64 {
    let total: f64 =
        f.modes.iter().map(|fm| trapezoid(&fm.values.iter().map(|v| v.norm_sqr()).collect::<Vec<_>>(), f.ds)).sum();
    (total * f.measure).sqrt()
}

/// Per-mode Fourier transforms on a λ grid.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierField {
    pub lambdas: Vec<f64>,
    pub measure: f64,
    pub modes: Vec<FieldMode>,
}

impl FourierField {
    pub fn mode(&self, k: Mode) -> Option<&[C64]> {
        self.modes.iter().find(|f| f.mode == k).map(|f| f.values.as_slice())
    }

    /// (1/2π) Σ_k ∫|F̂_k|² dλ · Lⁿ on a uniform λ grid.
    pub fn norm_sq(&self) -> f64 {
        let dl = if self.lambdas.len() > 1 { self.lambdas[1] - self.lambdas[0] } else { 0.0 };
        let total: f64 = self
            .modes
            .iter()
            .map(|fm| trapezoid(&fm.values.iter().map(|v| v.norm_sqr()).collect::<Vec<_>>(), dl))
            .sum();
        total * self.measure / (2.0 * core::f64::consts::PI)
    }
}

/// Uniform λ grid of `points` samples on [−λ_max, λ_max].
pub fn lambda_grid(points: usize, lambda_max: f64) -> Vec<f64> {
    if points < 2 {
        return vec![0.0; points];
    }
    let h = 2.0 * lambda_max / (points - 1) as f64;
    (0..points).map(|i| -lambda_max + i as f64 * h).collect()
}

/// Default λ grid: 512 points, |λ| ≤ 16.
pub fn default_lambda_grid() -> Vec<f64> {
    lambda_grid(512, 16.0)
}

/// Edge-to-peak ratio of |F| over the window.
pub fn tail_ratio(f: &RadiationField) -> f64 {
    let peak = f.max_abs();
    if peak == 0.0 {
        return 0.0;
    }
    let edge = f
        .modes
        .iter()
        .filter_map(|fm| Some(fm.values.first()?.norm().max(fm.values.last()?.norm())))
        .fold(0.0, f64::max);
    edge / peak
}

/// F̂_k(λ) = Σ_s e^{iλs} F_k(s) ds, the transform of the zero-extended samples.
pub fn fourier_field(f: &RadiationField, lambdas: &[f64]) -> Result<FourierField> {
    let ratio = tail_ratio(f);
    if ratio > TAIL_TOL {
        return Err(Error::TailNotDecayed { ratio });
    }
    Ok(fourier_field_unchecked(f, lambdas))
}

/// Transform without the tail check.
pub fn fourier_field_unchecked(f: &RadiationField, lambdas: &[f64]) -> FourierField {
    let modes = f
        .modes
        .iter()
        .map(|fm| FieldMode {
            mode: fm.mode,
            values: par::map(lambdas, |&l| {
                let step = C64::new(0.0, l * f.ds).exp();
                let mut phase = C64::new(0.0, l * f.s_min).exp();
                let mut acc = ZERO;
                for (i, v) in fm.values.iter().enumerate() {
                    if i % 64 == 0 {
                        phase = C64::new(0.0, l * f.s_at(i)).exp();
                    }
                    acc += v * phase;
                    phase *= step;
                }
                acc * f.ds
            }),
        })
        .collect();
    FourierField { lambdas: lambdas.to_vec(), measure: f.measure, modes }
}

/// L² norm of ∂ₜu(t) over the manifold, ∫|u_t|² cⁿ x^{−n−1} dx · Lⁿ, square-rooted.
pub fn velocity_norm(m: &WarpedMetric, d: &CauchyData) -> f64 {
    let nf = m.n as f64;
    let h = d.delta;
    let total: f64 = d
        .modes
        .iter()
        .map(|md| {
            let vals: Vec<f64> = (0..md.f2.len())
                .map(|a| {
                    if a == 0 {
                        return 0.0;
                    }
                    let mu = a as f64 * h;
                    let x = mu * mu;
                    md.f2[a].norm_sqr() * m.warp(x).powi(m.n as i32) * x.powf(-nf - 1.0) * 2.0 * mu
                })
                .collect();
            trapezoid(&vals, h)
        })
        .sum();
    (total * m.boundary_measure()).sqrt()
}

#[cfg(test)]
mod tests;

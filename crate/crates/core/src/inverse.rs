//! Support correspondence, the truncation projector on M^b, jump extraction and
//! the transport oracle behind collar recovery.
//!
//! For F = R₋(0, w) the truncation P F = R₋(0, χ w), χ the indicator of x ≥ x₁, and
//! S P F = R₊(0, χ w) jumps at s = log x₁ by ½ x₁^{-n/2} |h|^{1/4}(x₁) w(x₁) / |h|^{1/4}(0).

use alloc::vec;
use alloc::vec::Vec;
use num_traits::Float;

use crate::error::{Error, Result};
use crate::fields::{
    backward_field, convolve_s, forward_field_raw, inverse_forward_field_residual, FieldKind, RadiationField, Window,
    RANGE_TOL_DELTA_SQ,
};
use crate::grid::{CauchyData, DataSpec, GridSpec};
use crate::math::{interp_uniform6, rk4_step, C64};
use crate::metric::{Mode, WarpedMetric};
use crate::par;
use crate::scattering::{inverse_backward_odd, scattering_apply};
use crate::spectrum::find_point_spectrum;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Relative floor on |F| defining the support front s*.
pub const FRONT_FLOOR: f64 = 1e-10;

/// Truncated field with the aligned depth.
#[derive(Clone, Debug, PartialEq)]
pub struct Truncation {
    pub field: RadiationField,
    /// Depth x₁ moved onto the data grid.
    pub x1: f64,
    /// First retained diagonal node.
    pub node: usize,
}

/// First retained data node: the first a with cell boundary (a − ½)Δ at or beyond √x₁.
pub fn aligned_node(delta: f64, x1: f64) -> usize {
    (x1.sqrt() / delta + 0.5 - 1e-9).ceil().max(1.0) as usize
}

/// Cell boundary ((a − ½)Δ)² below node a.
pub fn aligned_depth(delta: f64, node: usize) -> f64 {
    let mu = (node as f64 - 0.5) * delta;
    mu * mu
}

/// χ_{x₁} f: zero on nodes below `node`.
pub fn truncate_data(d: &CauchyData, node: usize) -> CauchyData {
    let mut out = d.clone();
    for md in &mut out.modes {
        for a in 0..node.min(md.f1.len()) {
            md.f1[a] = ZERO;
            md.f2[a] = ZERO;
        }
    }
    out
}

/// R₋ without the support checks.
fn backward_raw(m: &WarpedMetric, d: &CauchyData, grid: &GridSpec) -> Result<RadiationField> {
    let mut f = forward_field_raw(m, &d.time_reversed(), grid)?.reflected()?;
    f.kind = FieldKind::Backward;
    Ok(f)
}

fn check_depth(m: &WarpedMetric, grid: &GridSpec, x1: f64) -> Result<()> {
    if !(x1 > grid.corner_guard() && x1 < m.x_max) {
        return Err(Error::InvalidParameter(alloc::format!(
            "truncation depth {x1} outside ({}, {})",
            grid.corner_guard(),
            m.x_max
        )));
    }
    Ok(())
}

/// P^b_{x₁} F = R₋(0, χ_{x₁} f) for F = R₋(0, f).
pub fn truncate_project(m: &WarpedMetric, f: &RadiationField, x1: f64, grid: &GridSpec) -> Result<Truncation> {
    check_depth(m, grid, x1)?;
    let data = inverse_backward_odd(m, f, grid)?;
    let node = aligned_node(grid.delta, x1);
    let field = backward_raw(m, &truncate_data(&data, node), grid)?;
    Ok(Truncation { field, x1: aligned_depth(grid.delta, node), node })
}

/// Settings of the one-sided jump fit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JumpFit {
    /// Samples skipped after log x₁ to clear the discrete front.
    pub guard: usize,
    /// Fit samples, 8 to 32.
    pub samples: usize,
    /// Largest accepted rms residual relative to the fitted peak.
    pub residual_tol: f64,
}

impl Default for JumpFit {
    fn default() -> Self {
        JumpFit { guard: 0, samples: 32, residual_tol: 2e-3 }
    }
}

/// Minimum number of fit samples.
pub const MIN_FIT_SAMPLES: usize = 8;
/// Maximum number of fit samples.
pub const MAX_FIT_SAMPLES: usize = 32;

/// Per-mode jump amplitudes at s = log x₁.
#[derive(Clone, Debug, PartialEq)]
pub struct JumpMeasurement {
    pub x1: f64,
    pub modes: Vec<Mode>,
    /// c₀ per mode.
    pub jump: Vec<C64>,
    /// c₁ per mode.
    pub slope: Vec<C64>,
    /// rms fit residual per mode relative to the largest fitted value.
    pub residual: Vec<f64>,
    /// First and last fitted s.
    pub window: (f64, f64),
    /// w(x₁) per mode at the aligned depth, from the odd inverse of the smoothed field.
    pub w: Vec<C64>,
}

impl JumpMeasurement {
    pub fn mode(&self, k: Mode) -> Option<C64> {
        self.modes.iter().position(|&m| m == k).map(|i| self.jump[i])
    }

    /// J(x₁, y) = Σ_k J_k e^{2πi k·y/L}.
    pub fn at_y(&self, period: f64, y: [f64; 2]) -> C64 {
        synthesize(&self.modes, &self.jump, period, y)
    }
}

fn synthesize(modes: &[Mode], values: &[C64], period: f64, y: [f64; 2]) -> C64 {
    let w = 2.0 * core::f64::consts::PI / period;
    modes
        .iter()
        .zip(values)
        .map(|(k, v)| *v * C64::from_polar(1.0, w * (k.0[0] as f64 * y[0] + k.0[1] as f64 * y[1])))
        .sum()
}

/// Least-squares fit of v ≈ c₀ + c₁ u + c₂ u², u = s − s₁; returns (c₀, c₁, rms residual).
fn fit_quadratic(u: &[f64], v: &[C64]) -> (C64, C64, f64) {
    let mut a = [[0.0f64; 3]; 3];
    let mut b = [ZERO; 3];
    for (&ui, &vi) in u.iter().zip(v) {
        let p = [1.0, ui, ui * ui];
        for r in 0..3 {
            for c in 0..3 {
                a[r][c] += p[r] * p[c];
            }
            b[r] += vi * p[r];
        }
    }
    let x = solve3(a, b);
    let rms = (u.iter().zip(v).map(|(&ui, &vi)| (vi - x[0] - x[1] * ui - x[2] * ui * ui).norm_sqr()).sum::<f64>()
        / u.len() as f64)
        .sqrt();
    (x[0], x[1], rms)
}

fn solve3(mut a: [[f64; 3]; 3], mut b: [C64; 3]) -> [C64; 3] {
    for col in 0..3 {
        let piv = (col..3).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())).unwrap_or(col);
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..3 {
            let f = a[r][col] / a[col][col];
            for c in col..3 {
                a[r][c] -= f * a[col][c];
            }
            let bc = b[col];
            b[r] -= bc * f;
        }
    }
    let mut x = [ZERO; 3];
    for r in (0..3).rev() {
        let mut acc = b[r];
        for c in r + 1..3 {
            acc -= x[c] * a[r][c];
        }
        x[r] = acc / a[r][r];
    }
    x
}

/// One-sided fit of the jump of `h` at s₁ over (s₁, s₁ + log 4).
pub fn fit_jump(h: &RadiationField, s1: f64, fit: &JumpFit) -> Result<(Vec<C64>, Vec<C64>, Vec<f64>, (f64, f64))> {
    let first = ((s1 - h.s_min) / h.ds).floor() as isize + 1 + fit.guard as isize;
    let last = (((s1 + 4.0f64.ln() - h.s_min) / h.ds).ceil() as isize - 1).min(h.len() as isize - 1);
    let available = (last - first + 1).max(0) as usize;
    let needed = fit.samples.clamp(MIN_FIT_SAMPLES, MAX_FIT_SAMPLES);
    if first < 0 || available < needed {
        return Err(Error::WindowTooShort { available, needed });
    }
    let idx: Vec<usize> = (0..needed).map(|i| first as usize + i).collect();
    let u: Vec<f64> = idx.iter().map(|&i| h.s_at(i) - s1).collect();
    let mut jump = Vec::with_capacity(h.modes.len());
    let mut slope = Vec::with_capacity(h.modes.len());
    let mut residual = Vec::with_capacity(h.modes.len());
    for fm in &h.modes {
        let v: Vec<C64> = idx.iter().map(|&i| fm.values[i]).collect();
        let peak = v.iter().fold(0.0f64, |a, x| a.max(x.norm()));
        let (c0, c1, rms) = fit_quadratic(&u, &v);
        let rel = if peak == 0.0 { 0.0 } else { rms / peak };
        if rel > fit.residual_tol {
            return Err(Error::FitResidualHigh { residual: rel, threshold: fit.residual_tol });
        }
        jump.push(c0);
        slope.push(c1);
        residual.push(rel);
    }
    Ok((jump, slope, residual, (u[0] + s1, u[needed - 1] + s1)))
}

/// Jump of S P^b_{x₁}(φ ∗ F) at s = log x₁.
pub fn jump_amplitude(
    m: &WarpedMetric,
    f: &RadiationField,
    x1: f64,
    phi: &Window,
    grid: &GridSpec,
    fit: &JumpFit,
) -> Result<JumpMeasurement> {
    spectrum_gate(m, &f.mode_list())?;
    let g = convolve_s(f, phi)?;
    let w_data = inverse_backward_odd(m, &g, grid)?;
    jump_from_data(m, &w_data, x1, grid, fit)
}

/// Jump of S P^b_{x₁} R₋(0, w) at s = log x₁ for given odd data w.
pub fn jump_from_data(
    m: &WarpedMetric,
    w_data: &CauchyData,
    x1: f64,
    grid: &GridSpec,
    fit: &JumpFit,
) -> Result<JumpMeasurement> {
    check_depth(m, grid, x1)?;
    let node = aligned_node(grid.delta, x1);
    let projected = backward_raw(m, &truncate_data(w_data, node), grid)?;
    let h = scattering_apply(m, &projected, grid)?;
    let x1 = aligned_depth(grid.delta, node);
    let (jump, slope, residual, window) = fit_jump(&h, x1.ln(), fit)?;
    let w = h.modes.iter().map(|fm| odd_data_at(w_data, fm.mode, x1)).collect();
    Ok(JumpMeasurement { x1, modes: h.mode_list(), jump, slope, residual, window, w })
}

/// f₂ of mode k at x, interpolated in √x between data nodes.
pub fn odd_data_at(d: &CauchyData, k: Mode, x: f64) -> C64 {
    d.mode(k).map(|md| interp_uniform6(&md.f2, 0.0, d.delta, x.sqrt())).unwrap_or(ZERO)
}

/// ½ x₁^{-n/2} |h|^{1/4}(x₁)/|h|^{1/4}(0) w.
pub fn predicted_jump(m: &WarpedMetric, w: C64, x1: f64) -> C64 {
    w * (0.5 * x1.powf(-0.5 * m.n as f64) * m.quarter_det(x1) / m.quarter_det(0.0))
}

/// v₁⁺ at x₁: ½ x₁^{-n/2-1} w.
pub fn transport_initial(m: &WarpedMetric, w: C64, x1: f64) -> C64 {
    w * (0.5 * x1.powf(-0.5 * m.n as f64 - 1.0))
}

/// v₁⁺ on x_i = x₁ i/steps from x₁(2∂ₓ + A)v = 0, integrated inward by RK4.
pub fn transport_v1(m: &WarpedMetric, x1: f64, w: C64, steps: usize) -> Vec<(f64, C64)> {
    let steps = steps.max(1);
    let h = -x1 / steps as f64;
    let rhs = |x: f64, v: &[C64; 1]| [v[0] * (-0.5 * m.mean_curvature(x))];
    let mut v = [transport_initial(m, w, x1)];
    let mut out = vec![(0.0, ZERO); steps + 1];
    out[steps] = (x1, v[0]);
    for i in (0..steps).rev() {
        let x = x1 * (i + 1) as f64 / steps as f64;
        v = rk4_step(&rhs, x, &v, h);
        out[i] = (x1 * i as f64 / steps as f64, v[0]);
    }
    out
}

/// ½ (|h|^{1/4}(x₁)/|h|^{1/4}(x)) x₁^{-n/2-1} w.
pub fn transport_v1_closed(m: &WarpedMetric, x1: f64, w: C64, x: f64) -> C64 {
    transport_initial(m, w, x1) * (m.quarter_det(x1) / m.quarter_det(x))
}

/// Support front of R₊(0, f) against the data support.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SupportReport {
    /// Earliest s with |F| above the floor; +∞ for zero data.
    pub s_star: f64,
    /// Inner edge of the data support.
    pub x_star: f64,
    /// |e^{s*} − x*|.
    pub gap: f64,
    /// Data grid step in x at x*, 2√x* Δ.
    pub cell: f64,
}

impl SupportReport {
    /// Gap in units of data cells.
    pub fn cells(&self) -> f64 {
        if self.gap == 0.0 {
            0.0
        } else {
            self.gap / self.cell
        }
    }
}

/// Compares the support front of R₊ d with inf supp d.
pub fn support_roundtrip(m: &WarpedMetric, d: &CauchyData, grid: &GridSpec) -> Result<SupportReport> {
    let Some((x_star, _)) = d.support() else {
        return Ok(SupportReport { s_star: f64::INFINITY, x_star: f64::INFINITY, gap: 0.0, cell: 0.0 });
    };
    let f = crate::fields::forward_field(m, d, grid)?;
    let floor = FRONT_FLOOR * f.max_abs();
    let first = (0..f.len()).find(|&i| f.modes.iter().any(|fm| fm.values[i].norm() > floor));
    let s_star = first.map(|i| f.s_at(i)).unwrap_or(f64::INFINITY);
    let cell = 2.0 * x_star.sqrt() * grid.delta;
    Ok(SupportReport { s_star, x_star, gap: (s_star.exp() - x_star).abs(), cell })
}

/// Equality verdict of [`recover_profile`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Equal,
    Differ,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Equal => "equal",
            Verdict::Differ => "differ",
        }
    }
}

/// Probe family, x₁ ladder and tolerances of a collar comparison.
#[derive(Clone, Debug, PartialEq)]
pub struct Recovery {
    pub probes: Vec<DataSpec>,
    pub ladder: Vec<f64>,
    pub window: Window,
    pub fit: JumpFit,
    /// Largest relative jump difference read as equal.
    pub profile_tol: f64,
    /// Largest range residual of the probes on the second metric read as equal operators.
    pub field_tol: f64,
    /// Largest probe-to-probe spread of the recovered |h|^{1/4} on one metric.
    pub spread_tol: f64,
}

impl Recovery {
    /// Mollifier of half-width 0.05, default fit, profile tolerance 2·10⁻⁶, operator
    /// tolerance 20Δ² and probe spread 1%.
    pub fn new(probes: Vec<DataSpec>, ladder: Vec<f64>, grid: &GridSpec) -> Self {
        Recovery {
            probes,
            ladder,
            window: Window::mollifier(0.05, grid.ds),
            fit: JumpFit::default(),
            profile_tol: 2e-6,
            field_tol: RANGE_TOL_DELTA_SQ * grid.delta * grid.delta,
            spread_tol: 1e-2,
        }
    }
}

/// Jump profiles of both metrics on a shared probe family.
#[derive(Clone, Debug, PartialEq)]
pub struct ProfileComparison {
    /// Aligned ladder.
    pub x1: Vec<f64>,
    /// Jumps on the reference metric, `[probe][ladder]`.
    pub reference: Vec<Vec<JumpMeasurement>>,
    /// Jumps on the second metric, `[probe][ladder]`.
    pub compare: Vec<Vec<JumpMeasurement>>,
    /// Largest relative jump difference per ladder point.
    pub rel_diff: Vec<f64>,
    /// Range residual of each probe field on the second metric.
    pub field_gap: Vec<f64>,
    /// |h|^{1/4}(x₁) recovered as J/(½ x₁^{-n/2} w), averaged over probes.
    pub warp_reference: Vec<f64>,
    pub warp_compare: Vec<f64>,
    pub verdict: Verdict,
    pub first_diff_x1: Option<f64>,
    /// Field-level agreement of the scattering operators on all probes.
    pub operators_agree: bool,
}

impl ProfileComparison {
    /// Largest relative profile difference over the ladder.
    pub fn max_rel_diff(&self) -> f64 {
        self.rel_diff.iter().fold(0.0, |a: f64, &b| a.max(b))
    }
}

fn ladder_jumps(
    m: &WarpedMetric,
    g: &RadiationField,
    set: &Recovery,
    grid: &GridSpec,
) -> Result<(Vec<JumpMeasurement>, f64)> {
    let (w_data, residual) = inverse_forward_field_residual(m, &g.reflected()?, grid)?;
    let jumps = par::map(&set.ladder, |&x1| jump_from_data(m, &w_data, x1, grid, &set.fit));
    Ok((jumps.into_iter().collect::<Result<Vec<_>>>()?, residual))
}

/// Per-ladder |h|^{1/4} estimates averaged over probes; fails on probe-to-probe spread.
fn recovered_warp(m: &WarpedMetric, runs: &[Vec<JumpMeasurement>], tol: f64) -> Result<Vec<f64>> {
    let points = runs.first().map_or(0, |r| r.len());
    let mut out = Vec::with_capacity(points);
    for i in 0..points {
        let mut est = Vec::new();
        for run in runs {
            let j = &run[i];
            for (jk, wk) in j.jump.iter().zip(&j.w) {
                let flat = *wk * (0.5 * j.x1.powf(-0.5 * m.n as f64));
                if flat.norm() > 0.0 {
                    est.push(jk.norm() / flat.norm());
                }
            }
        }
        if est.is_empty() {
            out.push(f64::NAN);
            continue;
        }
        let lo = est.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = est.iter().cloned().fold(0.0, f64::max);
        let mean = est.iter().sum::<f64>() / est.len() as f64;
        if (hi - lo) / mean > tol {
            return Err(Error::InconsistentProbes { spread: (hi - lo) / mean, threshold: tol });
        }
        out.push(mean);
    }
    Ok(out)
}

/// Runs the jump pipeline on m₁ and m₂ for probe fields R₋(0, f) built on m₁ and
/// flags the first x₁ where the jump profiles part.
///
/// Equal scattering operators give equal profiles, |h₁|^{1/4} w₁ = |h₂|^{1/4} w₂.
pub fn recover_profile(
    m1: &WarpedMetric,
    m2: &WarpedMetric,
    set: &Recovery,
    grid: &GridSpec,
) -> Result<ProfileComparison> {
    if set.probes.is_empty() || set.ladder.is_empty() {
        return Err(Error::InvalidParameter(alloc::string::String::from("empty probe family or ladder")));
    }
    if m1.n != m2.n || m1.period != m2.period {
        return Err(Error::InvalidParameter(alloc::format!(
            "boundary conventions differ: n {} vs {}, L {} vs {}",
            m1.n,
            m2.n,
            m1.period,
            m2.period
        )));
    }
    let modes: Vec<Mode> = set.probes.iter().flat_map(|p| p.mode_list()).collect();
    spectrum_gate(m1, &modes)?;
    spectrum_gate(m2, &modes)?;
    let mut reference = Vec::with_capacity(set.probes.len());
    let mut compare = Vec::with_capacity(set.probes.len());
    let mut field_gap = Vec::with_capacity(set.probes.len());
    for probe in &set.probes {
        let g = convolve_s(&backward_field(m1, &probe.sample(m1, grid), grid)?, &set.window)?;
        let (r, _) = ladder_jumps(m1, &g, set, grid)?;
        let (c, gap) = ladder_jumps(m2, &g, set, grid)?;
        reference.push(r);
        compare.push(c);
        field_gap.push(gap);
    }
    let warp_reference = recovered_warp(m1, &reference, set.spread_tol)?;
    let warp_compare = recovered_warp(m2, &compare, set.spread_tol)?;
    let mut rel_diff = vec![0.0f64; set.ladder.len()];
    for (r, c) in reference.iter().zip(&compare) {
        let scale = r.iter().flat_map(|j| j.jump.iter()).fold(0.0f64, |a, v| a.max(v.norm()));
        for (i, (jr, jc)) in r.iter().zip(c).enumerate() {
            for (a, b) in jr.jump.iter().zip(&jc.jump) {
                if a.norm() > PROFILE_FLOOR * scale {
                    rel_diff[i] = rel_diff[i].max((a - b).norm() / a.norm());
                }
            }
        }
    }
    let x1: Vec<f64> = reference[0].iter().map(|j| j.x1).collect();
    let mut order: Vec<usize> = (0..x1.len()).collect();
    order.sort_by(|&a, &b| x1[a].total_cmp(&x1[b]));
    let first_diff_x1 = order.iter().find(|&&i| rel_diff[i] > set.profile_tol).map(|&i| x1[i]);
    let verdict = if first_diff_x1.is_some() { Verdict::Differ } else { Verdict::Equal };
    let operators_agree = field_gap.iter().all(|&g| g <= set.field_tol);
    Ok(ProfileComparison {
        x1,
        reference,
        compare,
        rel_diff,
        field_gap,
        warp_reference,
        warp_compare,
        verdict,
        first_diff_x1,
        operators_agree,
    })
}

/// Jumps below this fraction of a probe's largest jump are left out of the comparison.
pub const PROFILE_FLOOR: f64 = 1e-3;

/// Rejects metrics with point spectrum in (0, n²/4) on the given modes.
pub fn spectrum_gate(m: &WarpedMetric, modes: &[Mode]) -> Result<()> {
    let top = 0.25 * (m.n * m.n) as f64;
    let found = find_point_spectrum(m, modes, (1e-3, top - 1e-3))?;
    match found.first() {
        Some(&(_, mu)) => Err(Error::PointSpectrum { mu }),
        None => Ok(()),
    }
}

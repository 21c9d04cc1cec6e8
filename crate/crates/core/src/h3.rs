//! Exact hyperbolic 3-space reference: distance, geodesic spheres, the
//! spherical-mean solution of the wave equation and the horospherical
//! (Lax–Phillips) transform, all by direct quadrature of a closed-form source.
//!
//! Upper half space g = (dx² + |dy|²)/x². The wave equation is u_tt = Δu + u.

use alloc::vec::Vec;
use core::f64::consts::PI;
use num_traits::Float;

use crate::error::{Error, Result};
use crate::fields::RadiationField;
use crate::grid::{CauchyData, GridSpec};
use crate::math::{gauss_legendre, smooth_bump, C64};
use crate::metric::{mode_set, Mode, WarpedMetric};
use crate::par;

/// Prefactor of the horosphere integral in the transform, ∂ₛ[H/(2π eˢ)].
pub const LP_NORMALIZATION: f64 = 1.0 / (2.0 * PI);
/// Relative change allowed under quadrature-order doubling.
pub const QUADRATURE_TOL: f64 = 5e-3;
/// Relative change allowed under halving of the s-differencing step.
pub const DIFFERENCING_TOL: f64 = 5e-3;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct H3Point {
    pub x: f64,
    pub y: [f64; 2],
}

impl H3Point {
    pub fn new(x: f64, y1: f64, y2: f64) -> Self {
        H3Point { x, y: [y1, y2] }
    }
}

/// cosh d = (x² + x′² + |y − y′|²)/(2xx′).
pub fn h3_distance(z: H3Point, w: H3Point) -> f64 {
    let dy2 = (z.y[0] - w.y[0]).powi(2) + (z.y[1] - w.y[1]).powi(2);
    let c = (z.x * z.x + w.x * w.x + dy2) / (2.0 * z.x * w.x);
    c.max(1.0).acosh()
}

/// Area 4π sinh² t of a geodesic sphere of radius t.
pub fn sphere_area(t: f64) -> f64 {
    4.0 * PI * t.sinh().powi(2)
}

/// Closed-form source on H³ with a bounding box of its support.
pub trait H3Source: Sync {
    fn eval(&self, x: f64, y1: f64, y2: f64) -> f64;
    /// [x_lo, x_hi], [y1_lo, y1_hi], [y2_lo, y2_hi]; infinite bounds allowed.
    fn support(&self) -> [[f64; 2]; 3];
}

/// Product of smooth bumps in x, y₁ and y₂.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeparableBump {
    pub x: (f64, f64),
    pub y1: (f64, f64),
    pub y2: (f64, f64),
    pub amplitude: f64,
}

impl H3Source for SeparableBump {
    fn eval(&self, x: f64, y1: f64, y2: f64) -> f64 {
        self.amplitude
            * smooth_bump(x, self.x.0, self.x.1)
            * smooth_bump(y1, self.y1.0, self.y1.1)
            * smooth_bump(y2, self.y2.0, self.y2.1)
    }

    fn support(&self) -> [[f64; 2]; 3] {
        let b = |(c, w): (f64, f64)| [c - w, c + w];
        [b(self.x), b(self.y1), b(self.y2)]
    }
}

impl SeparableBump {
    /// (1/L)∫ bump(y) e^{−iκy} dy for one horizontal factor.
    fn factor_coefficient((c, w): (f64, f64), kappa: f64, period: f64) -> C64 {
        let (nodes, weights) = gauss_legendre(64);
        let mut acc = C64::new(0.0, 0.0);
        for (t, wt) in nodes.iter().zip(&weights) {
            let y = c + w * t;
            acc += C64::new(0.0, -kappa * y).exp() * (smooth_bump(y, c, w) * wt * w);
        }
        acc / period
    }

    /// Fourier coefficient of the horizontal factor on the torus of side `period`.
    pub fn mode_coefficient(&self, k: Mode, period: f64) -> C64 {
        let scale = 2.0 * PI / period;
        Self::factor_coefficient(self.y1, scale * k.0[0] as f64, period)
            * Self::factor_coefficient(self.y2, scale * k.0[1] as f64, period)
            * self.amplitude
    }

    /// x-profile of the source.
    pub fn radial(&self, x: f64) -> f64 {
        smooth_bump(x, self.x.0, self.x.1)
    }
}

/// Composite Gauss rule: `panels` panels of `order` nodes in each angle.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SphereQuadrature {
    pub panels: usize,
    pub order: usize,
}

impl Default for SphereQuadrature {
    fn default() -> Self {
        SphereQuadrature { panels: 8, order: 8 }
    }
}

impl SphereQuadrature {
    pub fn doubled(self) -> Self {
        SphereQuadrature { panels: self.panels * 2, ..self }
    }
}

fn composite(
    lo: f64,
    hi: f64,
    q: SphereQuadrature,
    rule: &(Vec<f64>, Vec<f64>),
) -> impl Iterator<Item = (f64, f64)> + '_ {
    let h = (hi - lo) / q.panels as f64;
    (0..q.panels).flat_map(move |p| {
        let a = lo + p as f64 * h;
        rule.0.iter().zip(&rule.1).map(move |(t, w)| (a + 0.5 * h * (t + 1.0), 0.5 * h * w))
    })
}

/// ∫ f dσ_g over the Euclidean sphere with center (xc, y) and radius ρ, dσ_g = dσ_e/x².
fn euclidean_sphere_integral(f: &dyn H3Source, xc: f64, y: [f64; 2], rho: f64, q: SphereQuadrature) -> f64 {
    let [sx, sy1, sy2] = f.support();
    let clamp = |v: f64| v.clamp(-1.0, 1.0);
    // cos θ range from the x-extent of the support, θ measured from the top.
    let c_lo = clamp((sx[0] - xc) / rho);
    let c_hi = clamp((sx[1] - xc) / rho);
    if c_hi <= c_lo {
        return 0.0;
    }
    let (th_lo, th_hi) = (c_hi.acos(), c_lo.acos());
    // Horizontal support as a disk around its center.
    let finite = sy1.iter().chain(&sy2).all(|v| v.is_finite());
    let (yc, ry) = if finite {
        let yc = [0.5 * (sy1[0] + sy1[1]), 0.5 * (sy2[0] + sy2[1])];
        let ry = 0.5 * ((sy1[1] - sy1[0]).powi(2) + (sy2[1] - sy2[0]).powi(2)).sqrt();
        (yc, ry)
    } else {
        ([0.0, 0.0], f64::INFINITY)
    };
    let dist = ((y[0] - yc[0]).powi(2) + (y[1] - yc[1]).powi(2)).sqrt();
    let dir = (yc[1] - y[1]).atan2(yc[0] - y[0]);
    let rule = gauss_legendre(q.order);
    let mut total = 0.0;
    for (th, wt) in composite(th_lo, th_hi, q, &rule) {
        let (s, c) = th.sin_cos();
        let xp = xc + rho * c;
        if xp <= 0.0 {
            continue;
        }
        let r = rho * s;
        // Angular window of the circle of radius r that meets the support disk.
        let (ph_lo, ph_hi) = if !ry.is_finite() || dist + r <= ry {
            (-PI, PI)
        } else if dist > r + ry || r < 1e-300 || r + ry < dist || dist + ry < r {
            continue;
        } else {
            let cos_a = ((r * r + dist * dist - ry * ry) / (2.0 * r * dist)).clamp(-1.0, 1.0);
            let a = cos_a.acos();
            (dir - a, dir + a)
        };
        let mut ring = 0.0;
        for (ph, wp) in composite(ph_lo, ph_hi, q, &rule) {
            let (sp, cp) = ph.sin_cos();
            ring += wp * f.eval(xp, y[0] + r * cp, y[1] + r * sp);
        }
        total += wt * ring * rho * rho * s / (xp * xp);
    }
    total
}

fn relative_change(a: f64, b: f64, scale: f64) -> f64 {
    let den = b.abs().max(scale);
    if den == 0.0 {
        0.0
    } else {
        (a - b).abs() / den
    }
}

/// M(f, t, z) at a fixed rule.
pub fn spherical_mean_with(f: &dyn H3Source, t: f64, z: H3Point, q: SphereQuadrature) -> f64 {
    if t <= 0.0 {
        return f.eval(z.x, z.y[0], z.y[1]);
    }
    euclidean_sphere_integral(f, z.x * t.cosh(), z.y, z.x * t.sinh(), q) / sphere_area(t)
}

/// M(f, t, z) with an order-doubling check.
pub fn spherical_mean(f: &dyn H3Source, t: f64, z: H3Point, q: SphereQuadrature) -> Result<f64> {
    let a = spherical_mean_with(f, t, z, q);
    let b = spherical_mean_with(f, t, z, q.doubled());
    let change = relative_change(a, b, 1e-12);
    if change > QUADRATURE_TOL {
        return Err(Error::QuadratureUnresolved { change });
    }
    Ok(b)
}

/// u(t, z) = sinh t · M(f, t, z), the solution with data (0, f).
pub fn wave_solution_h3(f: &dyn H3Source, t: f64, z: H3Point, q: SphereQuadrature) -> Result<f64> {
    Ok(t.sinh() * spherical_mean(f, t, z, q)?)
}

/// u(t, z) at a fixed rule.
pub fn wave_solution_h3_with(f: &dyn H3Source, t: f64, z: H3Point, q: SphereQuadrature) -> f64 {
    t.sinh() * spherical_mean_with(f, t, z, q)
}

/// H(s, y): integral of f over the horosphere tangent at (0, y) with diameter eˢ.
pub fn horosphere_integral(f: &dyn H3Source, s: f64, y: [f64; 2], q: SphereQuadrature) -> f64 {
    let r = 0.5 * s.exp();
    euclidean_sphere_integral(f, r, y, r, q)
}

/// Quadrature rule and differencing step for [`lax_phillips_field`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LaxPhillips {
    pub quadrature: SphereQuadrature,
    pub step: f64,
}

impl Default for LaxPhillips {
    fn default() -> Self {
        LaxPhillips { quadrature: SphereQuadrature::default(), step: 2e-3 }
    }
}

fn lp_value(f: &dyn H3Source, s: f64, y: [f64; 2], q: SphereQuadrature, h: f64) -> f64 {
    let g = |s: f64| LP_NORMALIZATION * horosphere_integral(f, s, y, q) * (-s).exp();
    (g(s + h) - g(s - h)) / (2.0 * h)
}

/// Transform samples at a fixed rule and step, without refinement checks.
pub fn lax_phillips_field_with(f: &dyn H3Source, s: &[f64], y: &[[f64; 2]], lp: LaxPhillips) -> Vec<f64> {
    let points: Vec<(f64, [f64; 2])> = s.iter().flat_map(|&si| y.iter().map(move |&yj| (si, yj))).collect();
    par::map(&points, |&(si, yj)| lp_value(f, si, yj, lp.quadrature, lp.step))
}

/// R₊(0, f)(s, y) = ∂ₛ[H(s, y)/(2π eˢ)] on the product grid `s` × `y`, row-major in s.
///
/// Fails when doubling the quadrature or halving the step moves any sample by
/// more than 0.5% of the largest sample.
pub fn lax_phillips_field(f: &dyn H3Source, s: &[f64], y: &[[f64; 2]], lp: LaxPhillips) -> Result<Vec<f64>> {
    let points: Vec<(f64, [f64; 2])> = s.iter().flat_map(|&si| y.iter().map(move |&yj| (si, yj))).collect();
    let runs = par::map(&points, |&(si, yj)| {
        (
            lp_value(f, si, yj, lp.quadrature, lp.step),
            lp_value(f, si, yj, lp.quadrature.doubled(), lp.step),
            lp_value(f, si, yj, lp.quadrature, 0.5 * lp.step),
        )
    });
    let scale = runs.iter().fold(0.0f64, |m, r| m.max(r.0.abs()));
    let tol_scale = 1e-12f64.max(scale);
    let quad = runs.iter().map(|r| (r.0 - r.1).abs()).fold(0.0, f64::max) / tol_scale;
    if quad > QUADRATURE_TOL {
        return Err(Error::QuadratureUnresolved { change: quad });
    }
    let diff = runs.iter().map(|r| (r.0 - r.2).abs()).fold(0.0, f64::max) / tol_scale;
    if diff > DIFFERENCING_TOL {
        return Err(Error::DifferencingUnresolved { change: diff });
    }
    Ok(runs.into_iter().map(|r| r.1).collect())
}

/// Lattice translates summed by [`periodized_lax_phillips`]: shifts in {−1, 0, 1}².
const TRANSLATES: [(f64, f64); 9] =
    [(-1.0, -1.0), (-1.0, 0.0), (-1.0, 1.0), (0.0, -1.0), (0.0, 0.0), (0.0, 1.0), (1.0, -1.0), (1.0, 0.0), (1.0, 1.0)];

fn shifted(y: &[[f64; 2]], period: f64, (a, b): (f64, f64)) -> Vec<[f64; 2]> {
    y.iter().map(|p| [p[0] - a * period, p[1] - b * period]).collect()
}

/// Transform of the periodization of f on the torus of side `period`, with refinement checks.
///
/// Sums the nearest lattice translates; valid while horospheres stay below one period across.
pub fn periodized_lax_phillips(
    f: &dyn H3Source,
    s: &[f64],
    y: &[[f64; 2]],
    period: f64,
    lp: LaxPhillips,
) -> Result<Vec<f64>> {
    let mut out = alloc::vec![0.0; s.len() * y.len()];
    for shift in TRANSLATES {
        let part = lax_phillips_field(f, s, &shifted(y, period, shift), lp)?;
        out.iter_mut().zip(part).for_each(|(o, p)| *o += p);
    }
    Ok(out)
}

/// [`periodized_lax_phillips`] at a fixed rule and step.
pub fn periodized_lax_phillips_with(
    f: &dyn H3Source,
    s: &[f64],
    y: &[[f64; 2]],
    period: f64,
    lp: LaxPhillips,
) -> Vec<f64> {
    let mut out = alloc::vec![0.0; s.len() * y.len()];
    for shift in TRANSLATES {
        let part = lax_phillips_field_with(f, s, &shifted(y, period, shift), lp);
        out.iter_mut().zip(part).for_each(|(o, p)| *o += p);
    }
    out
}

/// Cauchy data (0, f) of the periodized source on every mode of `grid`.
pub fn torus_data(m: &WarpedMetric, grid: &GridSpec, f: &SeparableBump) -> CauchyData {
    let modes = mode_set(m.n, grid.k_max);
    let coef: Vec<(Mode, C64)> = modes.iter().map(|&k| (k, f.mode_coefficient(k, m.period))).collect();
    CauchyData::sample(m, grid, &modes, |k, x| {
        let c = coef.iter().find(|(kk, _)| *kk == k).map(|p| p.1).unwrap_or(C64::new(0.0, 0.0));
        (C64::new(0.0, 0.0), c * f.radial(x))
    })
}

/// Field values F(s, y) on the product grid, row-major in s, synthesized from modes.
pub fn torus_field_samples(field: &RadiationField, period: f64, s: &[f64], y: &[[f64; 2]]) -> Vec<f64> {
    let mut out = Vec::with_capacity(s.len() * y.len());
    for &si in s {
        let vals: Vec<(Mode, C64)> = field.modes.iter().map(|fm| (fm.mode, field.eval(fm.mode, si))).collect();
        out.extend(y.iter().map(|&yj| synthesize_torus(&vals, period, yj)));
    }
    out
}

/// ‖a − b‖/‖b‖ over paired samples.
pub fn relative_l2(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum();
    let den: f64 = b.iter().map(|y| y * y).sum();
    if den == 0.0 {
        if num == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        (num / den).sqrt()
    }
}

/// Uniform n × n grid of horizontal points on the torus of side `period`.
pub fn torus_points(period: f64, n: usize) -> Vec<[f64; 2]> {
    (0..n).flat_map(|i| (0..n).map(move |j| [period * i as f64 / n as f64, period * j as f64 / n as f64])).collect()
}

/// F(s, y) = Σ_k F_k(s) e^{iκ·y} from per-mode samples on the flat torus of side `period`.
pub fn synthesize_torus(modes: &[(Mode, C64)], period: f64, y: [f64; 2]) -> f64 {
    let scale = 2.0 * PI / period;
    modes
        .iter()
        .map(|(k, v)| {
            let phase = scale * (k.0[0] as f64 * y[0] + k.0[1] as f64 * y[1]);
            (v * C64::new(0.0, phase).exp()).re
        })
        .sum()
}

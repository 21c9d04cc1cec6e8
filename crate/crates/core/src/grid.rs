//! Discretization parameters and Cauchy data on the characteristic diagonal grid.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use num_traits::Float;

use crate::error::{Error, Result};
use crate::math::{smooth_bump, smooth_bump_deriv, C64};
use crate::metric::{Mode, WarpedMetric};

/// Characteristic step, time extent, mode cutoff and s-sampling.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    /// Step Δ in x′ and t′.
    pub delta: f64,
    /// Largest t′ reached by the march.
    pub t_max: f64,
    /// Highest retained Fourier mode.
    pub k_max: i32,
    /// s-sample spacing.
    pub ds: f64,
    /// s-window [s_min, s_max].
    pub s_min: f64,
    pub s_max: f64,
}

impl GridSpec {
    /// Grid with a symmetric s-window [−s_max, s_max] and T = e^{s_max/2}.
    pub fn symmetric(delta: f64, s_max: f64, ds: f64, k_max: i32) -> Self {
        GridSpec { delta, t_max: (0.5 * s_max).exp(), k_max, ds, s_min: -s_max, s_max }
    }

    pub fn validate(&self, m: &WarpedMetric) -> Result<()> {
        if !(self.delta > 0.0) || !(self.ds > 0.0) || self.k_max < 0 {
            return Err(Error::InvalidParameter(format!("bad grid {self:?}")));
        }
        if !(self.s_min < self.s_max) {
            return Err(Error::InvalidParameter(format!("empty s-window [{}, {}]", self.s_min, self.s_max)));
        }
        let limit = 2.0 * self.t_max.ln();
        if self.s_max > limit + 1e-12 {
            return Err(Error::WindowExceedsTriangle { s_max: self.s_max, limit });
        }
        if self.delta > 0.25 * m.x_max.sqrt() {
            return Err(Error::InvalidParameter(format!("step {} too coarse for x_max {}", self.delta, m.x_max)));
        }
        Ok(())
    }

    /// Number of s samples.
    pub fn s_len(&self) -> usize {
        ((self.s_max - self.s_min) / self.ds + 1e-9).floor() as usize + 1
    }

    pub fn s_at(&self, i: usize) -> f64 {
        self.s_min + i as f64 * self.ds
    }

    /// Index of the last t′ column, floor(T/Δ).
    pub fn last_column(&self) -> usize {
        (self.t_max / self.delta + 1e-9).floor() as usize
    }

    /// Index of the last diagonal node μ = aΔ with μ² ≤ X_MAX.
    pub fn last_diagonal(&self, m: &WarpedMetric) -> usize {
        (m.x_max.sqrt() / self.delta + 1e-9).floor() as usize
    }

    /// The same grid with Δ halved.
    pub fn refined(&self) -> Self {
        GridSpec { delta: 0.5 * self.delta, ..*self }
    }

    /// Smallest admissible inner support edge (4Δ)².
    pub fn corner_guard(&self) -> f64 {
        16.0 * self.delta * self.delta
    }
}

/// Cauchy data of one boundary mode sampled at x_a = (aΔ)².
#[derive(Clone, Debug, PartialEq)]
pub struct ModeData {
    pub mode: Mode,
    pub f1: Vec<C64>,
    pub f2: Vec<C64>,
}

/// Initial pair (f₁, f₂) per retained mode; absent modes are zero.
#[derive(Clone, Debug, PartialEq)]
pub struct CauchyData {
    pub delta: f64,
    pub modes: Vec<ModeData>,
}

/// Relative floor used for support markers.
pub const SUPPORT_FLOOR: f64 = 1e-14;

impl CauchyData {
    pub fn zero(delta: f64) -> Self {
        CauchyData { delta, modes: Vec::new() }
    }

    /// Samples closed-form data `f(mode, x) -> (f₁, f₂)` on the diagonal grid of `grid`.
    pub fn sample(m: &WarpedMetric, grid: &GridSpec, modes: &[Mode], f: impl Fn(Mode, f64) -> (C64, C64)) -> Self {
        let len = grid.last_diagonal(m) + 1;
        let modes = modes
            .iter()
            .map(|&k| {
                let mut f1 = vec![C64::new(0.0, 0.0); len];
                let mut f2 = vec![C64::new(0.0, 0.0); len];
                for a in 1..len {
                    let mu = a as f64 * grid.delta;
                    let (v1, v2) = f(k, mu * mu);
                    f1[a] = v1;
                    f2[a] = v2;
                }
                ModeData { mode: k, f1, f2 }
            })
            .collect();
        CauchyData { delta: grid.delta, modes }
    }

    pub fn len(&self) -> usize {
        self.modes.first().map(|d| d.f1.len()).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn x_at(&self, a: usize) -> f64 {
        let mu = a as f64 * self.delta;
        mu * mu
    }

    pub fn mode(&self, k: Mode) -> Option<&ModeData> {
        self.modes.iter().find(|d| d.mode == k)
    }

    fn max_abs(&self) -> f64 {
        self.modes.iter().flat_map(|d| d.f1.iter().chain(d.f2.iter())).fold(0.0, |acc, v| acc.max(v.norm()))
    }

    /// Support markers (x_lo, x_hi) bracketing samples above the relative floor.
    pub fn support(&self) -> Option<(f64, f64)> {
        let floor = SUPPORT_FLOOR * self.max_abs();
        if floor == 0.0 {
            return None;
        }
        let mut lo = usize::MAX;
        let mut hi = 0;
        for d in &self.modes {
            for a in 0..d.f1.len() {
                if d.f1[a].norm() > floor || d.f2[a].norm() > floor {
                    lo = lo.min(a);
                    hi = hi.max(a);
                }
            }
        }
        Some((self.x_at(lo), self.x_at(hi)))
    }

    /// Index of the first node carrying data above the floor.
    pub fn first_support_node(&self) -> Option<usize> {
        let floor = SUPPORT_FLOOR * self.max_abs();
        if floor == 0.0 {
            return None;
        }
        self.modes
            .iter()
            .filter_map(|d| (0..d.f1.len()).find(|&a| d.f1[a].norm() > floor || d.f2[a].norm() > floor))
            .min()
    }

    pub fn scaled(&self, s: C64) -> Self {
        let mut out = self.clone();
        for d in &mut out.modes {
            d.f1.iter_mut().for_each(|v| *v *= s);
            d.f2.iter_mut().for_each(|v| *v *= s);
        }
        out
    }

    /// Even part (f₁, 0).
    pub fn even_part(&self) -> Self {
        let mut out = self.clone();
        for d in &mut out.modes {
            d.f2.iter_mut().for_each(|v| *v = C64::new(0.0, 0.0));
        }
        out
    }

    /// Odd part (0, f₂).
    pub fn odd_part(&self) -> Self {
        let mut out = self.clone();
        for d in &mut out.modes {
            d.f1.iter_mut().for_each(|v| *v = C64::new(0.0, 0.0));
        }
        out
    }

    /// (−f₁, f₂).
    pub fn time_reversed(&self) -> Self {
        let mut out = self.clone();
        for d in &mut out.modes {
            d.f1.iter_mut().for_each(|v| *v = -*v);
        }
        out
    }

    /// Sample-wise combination `self + s·other` over the union of modes.
    pub fn axpy(&self, s: C64, other: &CauchyData) -> Result<Self> {
        if (self.delta - other.delta).abs() > 1e-15 * self.delta {
            return Err(Error::GridMismatch(format!("{} vs {}", self.delta, other.delta)));
        }
        let mut out = self.clone();
        for od in &other.modes {
            match out.modes.iter_mut().find(|d| d.mode == od.mode) {
                Some(d) => {
                    for a in 0..d.f1.len().min(od.f1.len()) {
                        d.f1[a] += od.f1[a] * s;
                        d.f2[a] += od.f2[a] * s;
                    }
                }
                None => {
                    let mut d = od.clone();
                    d.f1.iter_mut().for_each(|v| *v *= s);
                    d.f2.iter_mut().for_each(|v| *v *= s);
                    out.modes.push(d);
                }
            }
        }
        Ok(out)
    }

    /// Largest pointwise difference relative to the largest sample of `self`.
    pub fn relative_max_diff(&self, other: &CauchyData) -> f64 {
        let scale = self.max_abs().max(1e-300);
        let mut worst: f64 = 0.0;
        for d in &self.modes {
            let o = other.mode(d.mode);
            for a in 0..d.f1.len() {
                let (g1, g2) = match o {
                    Some(o) if a < o.f1.len() => (o.f1[a], o.f2[a]),
                    _ => (C64::new(0.0, 0.0), C64::new(0.0, 0.0)),
                };
                worst = worst.max((d.f1[a] - g1).norm()).max((d.f2[a] - g2).norm());
            }
        }
        worst / scale
    }

    /// Checks the corner guard and the vanishing of data near the cap.
    pub fn check_support(&self, m: &WarpedMetric, grid: &GridSpec) -> Result<()> {
        let Some((x_lo, _)) = self.support() else {
            return Ok(());
        };
        if x_lo < grid.corner_guard() {
            return Err(Error::SupportTouchesCorner { x_lo, guard: grid.corner_guard() });
        }
        let scale = self.max_abs();
        let last = grid.last_diagonal(m);
        let mut worst: f64 = 0.0;
        for d in &self.modes {
            for a in last.saturating_sub(CAP_MARGIN_NODES)..d.f1.len() {
                worst = worst.max(d.f1[a].norm()).max(d.f2[a].norm());
            }
        }
        if worst > CAP_TOLERANCE * scale {
            return Err(Error::SupportTouchesCap { ratio: worst / scale });
        }
        Ok(())
    }
}

/// Number of diagonal nodes next to the cap on which data must vanish.
pub const CAP_MARGIN_NODES: usize = 3;
/// Relative size tolerated on those nodes.
pub const CAP_TOLERANCE: f64 = 1e-9;

/// A smooth compactly supported bump a·b((x − center)/half_width).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bump {
    pub center: f64,
    pub half_width: f64,
    pub amplitude: C64,
}

impl Bump {
    pub fn eval(&self, x: f64) -> C64 {
        self.amplitude * smooth_bump(x, self.center, self.half_width)
    }

    pub fn deriv(&self, x: f64) -> C64 {
        self.amplitude * smooth_bump_deriv(x, self.center, self.half_width)
    }

    pub fn inner_edge(&self) -> f64 {
        self.center - self.half_width
    }
}

/// Closed-form Cauchy data: bump sums for f₁ and f₂ on each listed mode.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct DataSpec {
    pub modes: Vec<(Mode, Vec<Bump>, Vec<Bump>)>,
}

impl DataSpec {
    pub fn mode_list(&self) -> Vec<Mode> {
        self.modes.iter().map(|(k, _, _)| *k).collect()
    }

    pub fn eval(&self, k: Mode, x: f64) -> (C64, C64) {
        let mut v = (C64::new(0.0, 0.0), C64::new(0.0, 0.0));
        for (mk, b1, b2) in &self.modes {
            if *mk == k {
                v.0 += b1.iter().map(|b| b.eval(x)).sum::<C64>();
                v.1 += b2.iter().map(|b| b.eval(x)).sum::<C64>();
            }
        }
        v
    }

    pub fn sample(&self, m: &WarpedMetric, grid: &GridSpec) -> CauchyData {
        let mut modes = self.mode_list();
        modes.sort();
        modes.dedup();
        CauchyData::sample(m, grid, &modes, |k, x| self.eval(k, x))
    }

    /// Smallest inner edge over all bumps.
    pub fn inner_edge(&self) -> Option<f64> {
        self.modes
            .iter()
            .flat_map(|(_, b1, b2)| b1.iter().chain(b2.iter()))
            .map(|b| b.inner_edge())
            .fold(None, |acc: Option<f64>, v| Some(acc.map_or(v, |a| a.min(v))))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::Profile;

    #[test]
    fn support_markers_bracket_bump() {
        let m = WarpedMetric::new(Profile::Hyperbolic, 1, 1.0, 1.0).unwrap();
        let g = GridSpec::symmetric(1e-2, 4.0, 0.01, 0);
        let spec = DataSpec {
            modes: vec![(
                Mode::one(0),
                vec![],
                vec![Bump { center: 0.35, half_width: 0.05, amplitude: C64::new(1.0, 0.0) }],
            )],
        };
        let d = spec.sample(&m, &g);
        let (lo, hi) = d.support().unwrap();
        assert!(lo >= 0.3 && lo < 0.32, "{lo}");
        assert!(hi <= 0.4 && hi > 0.38, "{hi}");
        d.check_support(&m, &g).unwrap();
    }

    #[test]
    fn corner_guard() {
        let m = WarpedMetric::new(Profile::Hyperbolic, 1, 1.0, 1.0).unwrap();
        let g = GridSpec::symmetric(1e-3, 4.0, 0.01, 0);
        let d = CauchyData::sample(&m, &g, &[Mode::one(0)], |_, x| {
            (C64::new(0.0, 0.0), C64::new(if x < 1e-5 { 1.0 } else { 0.0 }, 0.0))
        });
        assert!(matches!(d.check_support(&m, &g), Err(Error::SupportTouchesCorner { .. })));
    }

    #[test]
    fn cap_guard() {
        let m = WarpedMetric::new(Profile::Hyperbolic, 1, 1.0, 1.0).unwrap();
        let g = GridSpec::symmetric(1e-2, 4.0, 0.01, 0);
        let d = CauchyData::sample(&m, &g, &[Mode::one(0)], |_, x| {
            (C64::new(if x > 0.5 { x } else { 0.0 }, 0.0), C64::new(0.0, 0.0))
        });
        assert!(matches!(d.check_support(&m, &g), Err(Error::SupportTouchesCap { .. })));
    }
}

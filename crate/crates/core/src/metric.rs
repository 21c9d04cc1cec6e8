//! Warped-product model g = (dx² + c(x)²|dy|²)/x² on (0, X_MAX] × Tⁿ.

use alloc::format;
use num_traits::Float;

use crate::error::{Error, Result};

/// Smooth step σ(x) = ½(1 − tanh((x − center)/width)).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cutoff {
    pub center: f64,
    pub width: f64,
}

impl Default for Cutoff {
    fn default() -> Self {
        Cutoff { center: 0.75, width: 0.08 }
    }
}

impl Cutoff {
    /// Returns (σ, σ', σ'').
    pub fn eval(&self, x: f64) -> (f64, f64, f64) {
        let z = (x - self.center) / self.width;
        let th = z.tanh();
        let sech2 = 1.0 - th * th;
        (0.5 * (1.0 - th), -0.5 * sech2 / self.width, sech2 * th / (self.width * self.width))
    }
}

/// Warping profile c(x).
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Profile {
    /// c ≡ 1.
    Hyperbolic,
    /// c(x) = 1 + a x² σ(x).
    Funnel { a: f64, cutoff: Cutoff },
    /// c(x) = 1 + a exp(−(x − center)²/width²) σ(x).
    Bump { a: f64, center: f64, width: f64, cutoff: Cutoff },
}

impl Profile {
    pub fn funnel(a: f64) -> Self {
        Profile::Funnel { a, cutoff: Cutoff::default() }
    }

    pub fn bump(a: f64) -> Self {
        Profile::Bump { a, center: 0.5, width: 0.08, cutoff: Cutoff::default() }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Profile::Hyperbolic => "hyperbolic",
            Profile::Funnel { .. } => "funnel",
            Profile::Bump { .. } => "bump",
        }
    }

    /// Returns (c, c', c'') in closed form.
    pub fn eval(&self, x: f64) -> (f64, f64, f64) {
        match *self {
            Profile::Hyperbolic => (1.0, 0.0, 0.0),
            Profile::Funnel { a, cutoff } => {
                let (s, s1, s2) = cutoff.eval(x);
                let g = x * x * s;
                let g1 = 2.0 * x * s + x * x * s1;
                let g2 = 2.0 * s + 4.0 * x * s1 + x * x * s2;
                (1.0 + a * g, a * g1, a * g2)
            }
            Profile::Bump { a, center, width, cutoff } => {
                let (s, s1, s2) = cutoff.eval(x);
                let d = x - center;
                let w2 = width * width;
                let e = (-d * d / w2).exp();
                let e1 = -2.0 * d / w2 * e;
                let e2 = (4.0 * d * d / (w2 * w2) - 2.0 / w2) * e;
                let g = e * s;
                let g1 = e1 * s + e * s1;
                let g2 = e2 * s + 2.0 * e1 * s1 + e * s2;
                (1.0 + a * g, a * g1, a * g2)
            }
        }
    }
}

/// Boundary Fourier mode e^{2πi k·y/L}; for n = 1 the second index is zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mode(pub [i32; 2]);

impl Mode {
    pub fn one(k: i32) -> Self {
        Mode([k, 0])
    }

    pub fn two(k1: i32, k2: i32) -> Self {
        Mode([k1, k2])
    }

    pub fn negate(self) -> Self {
        Mode([-self.0[0], -self.0[1]])
    }

    pub fn norm_sq(self) -> f64 {
        let [a, b] = self.0;
        (a as f64) * (a as f64) + (b as f64) * (b as f64)
    }
}

/// All modes with |k_i| ≤ K in dimension `n`.
pub fn mode_set(n: usize, k_max: i32) -> alloc::vec::Vec<Mode> {
    let mut out = alloc::vec::Vec::new();
    for k1 in -k_max..=k_max {
        if n == 1 {
            out.push(Mode::one(k1));
        } else {
            for k2 in -k_max..=k_max {
                out.push(Mode::two(k1, k2));
            }
        }
    }
    out
}

/// Rotationally symmetric asymptotically hyperbolic model with a Dirichlet cap at `x_max`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WarpedMetric {
    pub n: usize,
    pub period: f64,
    pub x_max: f64,
    pub profile: Profile,
}

const NORMALIZATION_TOL: f64 = 1e-12;

impl WarpedMetric {
    pub fn new(profile: Profile, n: usize, period: f64, x_max: f64) -> Result<Self> {
        if n != 1 && n != 2 {
            return Err(Error::InvalidParameter(format!("n must be 1 or 2, got {n}")));
        }
        if !(period > 0.0) || !(x_max > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "period and x_max must be positive (L = {period}, x_max = {x_max})"
            )));
        }
        let m = WarpedMetric { n, period, x_max, profile };
        let (c0, c1, _) = profile.eval(0.0);
        if (c0 - 1.0).abs() > NORMALIZATION_TOL || c1.abs() > NORMALIZATION_TOL {
            return Err(Error::BadNormalization { c0: c0 - 1.0, c1 });
        }
        let checks = 4096;
        for i in 0..=checks {
            let x = x_max * i as f64 / checks as f64;
            let c = profile.eval(x).0;
            if !(c > 0.0) {
                return Err(Error::NonPositiveWarp { x });
            }
        }
        Ok(m)
    }

    pub fn hyperbolic(n: usize, period: f64, x_max: f64) -> Result<Self> {
        Self::new(Profile::Hyperbolic, n, period, x_max)
    }

    pub fn warp(&self, x: f64) -> f64 {
        self.profile.eval(x).0
    }

    /// |h|(x) = c^{2n}.
    pub fn det_h(&self, x: f64) -> f64 {
        self.warp(x).powi(2 * self.n as i32)
    }

    /// |h|^{1/4}(x) = c^{n/2}.
    pub fn quarter_det(&self, x: f64) -> f64 {
        let c = self.warp(x);
        if self.n == 2 {
            c
        } else {
            c.sqrt()
        }
    }

    /// A(x) = ½ ∂ₓ log|h| = n c'/c.
    pub fn mean_curvature(&self, x: f64) -> f64 {
        let (c, c1, _) = self.profile.eval(x);
        self.n as f64 * c1 / c
    }

    /// A'(x).
    pub fn mean_curvature_deriv(&self, x: f64) -> f64 {
        let (c, c1, c2) = self.profile.eval(x);
        let r = c1 / c;
        self.n as f64 * (c2 / c - r * r)
    }

    /// Zeroth-order coefficient left after conjugating the first-order terms by |h|^{1/4}.
    pub fn conjugation_potential(&self, p: f64) -> f64 {
        let (c, c1, c2) = self.profile.eval(p);
        let nf = self.n as f64;
        let r = c1 / c;
        let a = nf * r;
        let ap = nf * (c2 / c - r * r);
        0.5 * (nf - 1.0) * a - 0.5 * p * ap - 0.25 * p * a * a
    }

    /// Squared wavenumber (2π|k|/L)².
    pub fn kappa_sq(&self, k: Mode) -> f64 {
        let s = 2.0 * core::f64::consts::PI / self.period;
        s * s * k.norm_sq()
    }

    /// ω_k(x)², the Δ_h eigenvalue on mode k.
    pub fn mode_frequency_sq(&self, k: Mode, x: f64) -> f64 {
        let c = self.warp(x);
        self.kappa_sq(k) / (c * c)
    }

    pub fn mode_frequency(&self, k: Mode, x: f64) -> f64 {
        self.mode_frequency_sq(k, x).sqrt()
    }

    /// Boundary torus measure Lⁿ.
    pub fn boundary_measure(&self) -> f64 {
        self.period.powi(self.n as i32)
    }

    /// Potential of the characteristic system ∂ₓ'∂ₜ'W + q(x't')W = 0 on mode k.
    pub fn goursat_potential(&self, k: Mode, p: f64) -> f64 {
        self.conjugation_potential(p) - p * self.mode_frequency_sq(k, p)
    }

    /// Radial potential V(x) of −w'' + V w = λ² w in ρ = −log x.
    pub fn radial_potential(&self, k: Mode, x: f64) -> f64 {
        x * x * self.mode_frequency_sq(k, x) - x * self.conjugation_potential(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd3(f: impl Fn(f64) -> f64, x: f64) -> (f64, f64) {
        let h = 2.5e-4;
        let (fm2, fm1, f0, fp1, fp2) = (f(x - 2.0 * h), f(x - h), f(x), f(x + h), f(x + 2.0 * h));
        let d1 = (fm2 - 8.0 * fm1 + 8.0 * fp1 - fp2) / (12.0 * h);
        let d2 = (-fm2 + 16.0 * fm1 - 30.0 * f0 + 16.0 * fp1 - fp2) / (12.0 * h * h);
        (d1, d2)
    }

    #[test]
    fn profile_derivatives_match_differences() {
        for p in [Profile::funnel(0.1), Profile::bump(0.05), Profile::bump(-0.4)] {
            for &x in &[0.1, 0.37, 0.52, 0.74, 0.9] {
                let (_, c1, c2) = p.eval(x);
                let (d1, d2) = fd3(|x| p.eval(x).0, x);
                assert!((c1 - d1).abs() < 1e-7, "{p:?} {x} {c1} {d1}");
                assert!((c2 - d2).abs() < 1e-5, "{p:?} {x} {c2} {d2}");
            }
        }
    }

    #[test]
    fn funnel_mean_curvature_formula() {
        let m = WarpedMetric::new(Profile::funnel(0.1), 1, 6.283185307179586, 1.0).unwrap();
        let cut = Cutoff::default();
        let x = 0.4;
        let (s, s1, _) = cut.eval(x);
        let expected = (0.2 * x * s + 0.1 * x * x * s1) / (1.0 + 0.1 * x * x * s);
        assert!((m.mean_curvature(x) - expected).abs() < 1e-14);
    }

    #[test]
    fn normalization_at_boundary() {
        for p in [Profile::Hyperbolic, Profile::funnel(0.1), Profile::bump(0.05)] {
            let m = WarpedMetric::new(p, 2, 1.0, 1.0).unwrap();
            assert!((m.det_h(0.0) - 1.0).abs() < 1e-12);
            assert!(m.mean_curvature(0.0).abs() < 1e-12);
        }
    }

    #[test]
    fn bump_crossing_zero_is_rejected() {
        let p = Profile::Bump { a: -2.0, center: 0.5, width: 0.08, cutoff: Cutoff::default() };
        assert!(matches!(WarpedMetric::new(p, 1, 1.0, 1.0), Err(Error::NonPositiveWarp { .. })));
    }

    #[test]
    fn bad_normalization_is_rejected() {
        let p = Profile::Bump { a: 0.5, center: 0.05, width: 0.1, cutoff: Cutoff::default() };
        assert!(matches!(WarpedMetric::new(p, 1, 1.0, 1.0), Err(Error::BadNormalization { .. })));
    }

    #[test]
    fn mode_frequencies() {
        let tau = 6.283185307179586;
        let h = WarpedMetric::hyperbolic(1, tau, 1.0).unwrap();
        assert_eq!(h.mode_frequency_sq(Mode::one(0), 0.4), 0.0);
        assert!((h.mode_frequency_sq(Mode::one(1), 0.3) - 1.0).abs() < 1e-14);
        let f = WarpedMetric::new(Profile::funnel(0.1), 1, tau, 1.0).unwrap();
        let c = f.warp(0.5);
        assert!((f.mode_frequency_sq(Mode::one(2), 0.5) - 4.0 / (c * c)).abs() < 1e-13);
        assert_eq!(f.mode_frequency_sq(Mode::one(-3), 0.2), f.mode_frequency_sq(Mode::one(3), 0.2));
    }

    #[test]
    fn hyperbolic_coefficients_vanish() {
        let h = WarpedMetric::hyperbolic(2, 6.283185307179586, 1.0).unwrap();
        assert_eq!(h.goursat_potential(Mode::two(0, 0), 0.3), 0.0);
        assert!((h.goursat_potential(Mode::two(1, 0), 0.3) + 0.3).abs() < 1e-14);
    }

    mod props {
        use super::super::*;
        use proptest::prelude::*;

        fn profile() -> impl Strategy<Value = Profile> {
            prop_oneof![
                Just(Profile::Hyperbolic),
                (-0.5..2.0f64).prop_map(Profile::funnel),
                (-0.3..0.3f64).prop_map(Profile::bump),
            ]
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            #[test]
            fn mode_frequency_is_even_in_k(p in profile(), n in 1usize..=2, k1 in -6i32..=6, k2 in -6i32..=6, x in 0.0..1.0f64) {
                let m = WarpedMetric::new(p, n, 6.283185307179586, 1.0).unwrap();
                let k = if n == 1 { Mode::one(k1) } else { Mode::two(k1, k2) };
                prop_assert_eq!(m.mode_frequency_sq(k, x), m.mode_frequency_sq(k.negate(), x));
                prop_assert!(m.mode_frequency_sq(k, x) >= 0.0);
            }

            #[test]
            fn quarter_det_is_a_fourth_root(p in profile(), n in 1usize..=2, x in 0.0..1.0f64) {
                let m = WarpedMetric::new(p, n, 1.0, 1.0).unwrap();
                let q = m.quarter_det(x);
                prop_assert!((q.powi(4) - m.det_h(x)).abs() <= 1e-12 * m.det_h(x));
            }

            #[test]
            fn indicial_roots_sit_on_the_critical_line(p in profile(), n in 1usize..=2, k in 0i32..=4, l in -16.0..16.0f64) {
                let m = WarpedMetric::new(p, n, 6.283185307179586, 1.0).unwrap();
                let k = if n == 1 { Mode::one(k) } else { Mode::two(k, 0) };
                prop_assert!(crate::radial::indicial_deviation(&m, k, l) < 1e-9);
            }

            #[test]
            fn potentials_vanish_at_the_boundary(p in profile(), n in 1usize..=2, k in 0i32..=4) {
                let m = WarpedMetric::new(p, n, 6.283185307179586, 1.0).unwrap();
                let k = Mode::one(k);
                prop_assert_eq!(m.radial_potential(k, 0.0), 0.0);
                prop_assert!(m.goursat_potential(k, 0.0).abs() < 1e-12);
            }
        }
    }
}

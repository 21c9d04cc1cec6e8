//! Stationary radial problem on one boundary mode.
//!
//! With u = x^{n/2} |h|^{-1/4} w and ρ = −log x the mode equation
//! (Δ_g − n²/4 − λ²)u = 0 becomes −w'' + V w = λ² w, V = x²ω² − xC.
//! The Dirichlet cap sits at ρ₀ = −log X.

use alloc::format;
use num_traits::Float;

use crate::error::{Error, Result};
use crate::math::C64;
use crate::metric::{Mode, WarpedMetric};

/// Default matching depth of the Frobenius fit.
pub const EPS_FIT: f64 = 1e-3;
/// Largest accepted condition number of the two-branch fit.
pub const FIT_COND_LIMIT: f64 = 1e8;
const STEP: f64 = 1e-3;
const COARSE_STEP: f64 = 2e-2;
const FINE_UNTIL: f64 = 9.0;

/// Integrates w'' = (V − energy) w from the cap (w = 0, w' = 1) to `rho_end`.
pub fn shoot(m: &WarpedMetric, k: Mode, energy: f64, rho_end: f64) -> (f64, f64) {
    let rho0 = -m.x_max.ln();
    let mid = rho_end.min(FINE_UNTIL).max(rho0);
    let state = rk4_segment(m, k, energy, (rho0, mid), STEP, (0.0, 1.0));
    rk4_segment(m, k, energy, (mid, rho_end), COARSE_STEP, state)
}

fn rk4_segment(
    m: &WarpedMetric,
    k: Mode,
    energy: f64,
    (start, end): (f64, f64),
    step: f64,
    (mut w, mut dw): (f64, f64),
) -> (f64, f64) {
    let span = end - start;
    if span <= 0.0 {
        return (w, dw);
    }
    let steps = (span / step).ceil() as usize;
    let h = span / steps as f64;
    let rhs = |rho: f64, w: f64, dw: f64| (dw, (m.radial_potential(k, (-rho).exp()) - energy) * w);
    for i in 0..steps {
        let r = start + i as f64 * h;
        let (a1, b1) = rhs(r, w, dw);
        let (a2, b2) = rhs(r + 0.5 * h, w + 0.5 * h * a1, dw + 0.5 * h * b1);
        let (a3, b3) = rhs(r + 0.5 * h, w + 0.5 * h * a2, dw + 0.5 * h * b2);
        let (a4, b4) = rhs(r + h, w + h * a3, dw + h * b3);
        w += h / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
        dw += h / 6.0 * (b1 + 2.0 * b2 + 2.0 * b3 + b4);
    }
    (w, dw)
}

/// Taylor coefficients (v₂, v₃) of V(x) = v₂x² + v₃x³ + O(x⁴).
pub fn potential_taylor(m: &WarpedMetric, k: Mode) -> (f64, f64) {
    let nf = m.n as f64;
    let (_, _, cpp0) = m.profile.eval(0.0);
    let h = 1e-4;
    let (_, _, cpph) = m.profile.eval(h);
    let c2 = 0.5 * cpp0;
    let c3 = (cpph - cpp0) / (6.0 * h);
    let v2 = m.kappa_sq(k) - nf * (nf - 2.0) * c2;
    let v3 = -1.5 * nf * (nf - 3.0) * c3;
    (v2, v3)
}

/// Roots of the indicial polynomial at x = 0, read off the operator coefficients.
pub fn indicial_roots(m: &WarpedMetric, k: Mode, lambda: f64) -> [C64; 2] {
    // −x²∂² + b x∂ + c: b = (n−1) − xA at 0, c = x²ω² at 0.
    let nf = m.n as f64;
    let x0 = 0.0;
    let b0 = nf - 1.0 - x0 * m.mean_curvature(x0);
    let c0 = x0 * x0 * m.mode_frequency_sq(k, x0);
    let p = 1.0 + b0;
    let q = 0.25 * nf * nf + lambda * lambda - c0;
    let disc = C64::new(p * p - 4.0 * q, 0.0).sqrt();
    [(C64::new(p, 0.0) + disc) * 0.5, (C64::new(p, 0.0) - disc) * 0.5]
}

/// Largest deviation of the indicial roots from n/2 ± iλ, together with |V(x)|/x at small x.
pub fn indicial_deviation(m: &WarpedMetric, k: Mode, lambda: f64) -> f64 {
    let nf = m.n as f64;
    let r = indicial_roots(m, k, lambda);
    let want = [C64::new(0.5 * nf, lambda.abs()), C64::new(0.5 * nf, -lambda.abs())];
    let root_dev = (r[0] - want[0]).norm().max((r[1] - want[1]).norm());
    let x = 1e-12;
    let scale = 1.0 + potential_taylor(m, k).0.abs();
    let decay = (m.radial_potential(k, x) / x).abs() / scale + m.radial_potential(k, 0.0).abs();
    root_dev.max(decay)
}

/// Result of the two-branch fit at x = ε_fit.
#[derive(Clone, Copy, Debug)]
pub struct FrobeniusFit {
    /// Coefficient of x^{n/2+iλ}.
    pub alpha: C64,
    /// Coefficient of x^{n/2−iλ}.
    pub beta: C64,
    pub cond: f64,
    pub eps_fit: f64,
}

impl FrobeniusFit {
    pub fn scattering(&self) -> C64 {
        self.beta / self.alpha
    }
}

/// Branch e^{−iσλρ}(1 + e₂x² + e₃x³) and its ρ-derivative.
fn branch(lambda: f64, sigma: f64, v: (f64, f64), rho: f64) -> (C64, C64) {
    let il = C64::new(0.0, sigma * lambda);
    let e2 = C64::new(v.0, 0.0) / ((C64::new(2.0, 0.0) + il * 2.0) * 2.0);
    let e3 = C64::new(v.1, 0.0) / ((C64::new(3.0, 0.0) + il * 2.0) * 3.0);
    let x = (-rho).exp();
    let osc = (-il * rho).exp();
    let poly = C64::new(1.0, 0.0) + e2 * (x * x) + e3 * (x * x * x);
    let dpoly = -(e2 * (2.0 * x * x) + e3 * (3.0 * x * x * x));
    (osc * poly, osc * (dpoly - il * poly))
}

fn cond2(m: [[C64; 2]; 2]) -> f64 {
    let fro: f64 = m.iter().flatten().map(|z| z.norm_sqr()).sum();
    let det = (m[0][0] * m[1][1] - m[0][1] * m[1][0]).norm();
    if det == 0.0 {
        return f64::INFINITY;
    }
    // σ₁σ₂ = |det|, σ₁² + σ₂² = ‖M‖_F².
    let disc = (fro * fro - 4.0 * det * det).max(0.0).sqrt();
    let s1 = (0.5 * (fro + disc)).sqrt();
    let s2 = det / s1;
    s1 / s2
}

/// Shoots from the cap and fits u ≈ α x^{n/2+iλ}(…) + β x^{n/2−iλ}(…) at x = `eps_fit`.
pub fn stationary_fit(m: &WarpedMetric, k: Mode, lambda: f64, eps_fit: f64) -> Result<FrobeniusFit> {
    if lambda == 0.0 || !lambda.is_finite() {
        return Err(Error::InvalidParameter(format!("lambda must be real and nonzero, got {lambda}")));
    }
    if !(eps_fit > 0.0 && eps_fit < m.x_max) {
        return Err(Error::InvalidParameter(format!("eps_fit {eps_fit} outside (0, x_max)")));
    }
    let rho = -eps_fit.ln();
    let (w, dw) = shoot(m, k, lambda * lambda, rho);
    let v = potential_taylor(m, k);
    let (bp, dbp) = branch(lambda, 1.0, v, rho);
    let (bm, dbm) = branch(lambda, -1.0, v, rho);
    let mat = [[bp, bm], [dbp, dbm]];
    let cond = cond2(mat);
    if !(cond <= FIT_COND_LIMIT) {
        return Err(Error::FitIllConditioned { cond });
    }
    let det = bp * dbm - bm * dbp;
    let alpha = (C64::new(w, 0.0) * dbm - bm * dw) / det;
    let beta = (bp * dw - dbp * w) / det;
    Ok(FrobeniusFit { alpha, beta, cond, eps_fit })
}

/// Stationary scattering coefficient a_k(λ) = β/α.
pub fn scattering_matrix_stationary(m: &WarpedMetric, k: Mode, lambda: f64) -> Result<C64> {
    Ok(stationary_fit(m, k, lambda, EPS_FIT)?.scattering())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::Profile;

    const TAU: f64 = 6.283185307179586;

    #[test]
    fn hyperbolic_mode_zero_is_a_pure_phase() {
        let m = WarpedMetric::hyperbolic(1, TAU, 1.0).unwrap();
        let a = scattering_matrix_stationary(&m, Mode::one(0), 1.0).unwrap();
        assert!((a.norm() - 1.0).abs() < 1e-6);
        let m = WarpedMetric::hyperbolic(2, TAU, 0.7).unwrap();
        for lambda in [0.5, 1.0, 3.0] {
            let a = scattering_matrix_stationary(&m, Mode::two(0, 0), lambda).unwrap();
            let exact = -C64::new(0.0, 2.0 * lambda * 0.7f64.ln()).exp();
            assert!((a - exact).norm() < 1e-8, "{lambda}: {a} vs {exact}");
        }
    }

    #[test]
    fn unitary_and_reciprocal() {
        for p in [Profile::funnel(0.1), Profile::bump(0.05)] {
            let m = WarpedMetric::new(p, 1, TAU, 1.0).unwrap();
            for k in [0, 1, 4] {
                for lambda in [0.5, 2.0, 7.5] {
                    let a = scattering_matrix_stationary(&m, Mode::one(k), lambda).unwrap();
                    let b = scattering_matrix_stationary(&m, Mode::one(k), -lambda).unwrap();
                    assert!((a.norm() - 1.0).abs() < 1e-6, "{a}");
                    assert!((a * b - 1.0).norm() < 1e-6, "{a} {b}");
                }
            }
        }
    }

    #[test]
    fn fit_depth_halving_is_stable() {
        let m = WarpedMetric::new(Profile::funnel(0.1), 2, TAU, 1.0).unwrap();
        for k in [Mode::two(0, 0), Mode::two(1, 1), Mode::two(4, 0)] {
            for lambda in [0.5, 3.0, 8.0] {
                let a = stationary_fit(&m, k, lambda, EPS_FIT).unwrap().scattering();
                let b = stationary_fit(&m, k, lambda, 0.5 * EPS_FIT).unwrap().scattering();
                assert!((a - b).norm() < 1e-4, "{k:?} {lambda}");
            }
        }
    }

    #[test]
    fn indicial_roots_are_half_n_plus_minus_i_lambda() {
        for p in [Profile::Hyperbolic, Profile::funnel(0.1), Profile::bump(0.05)] {
            for n in [1, 2] {
                let m = WarpedMetric::new(p, n, TAU, 1.0).unwrap();
                for k in [Mode::one(0), Mode::one(3)] {
                    assert!(indicial_deviation(&m, k, 1.7) < 1e-10);
                }
            }
        }
    }

    #[test]
    fn taylor_coefficients_match_potential() {
        let m = WarpedMetric::new(Profile::funnel(0.1), 1, TAU, 1.0).unwrap();
        let (v2, v3) = potential_taylor(&m, Mode::one(2));
        for x in [1e-2, 5e-3] {
            let v = m.radial_potential(Mode::one(2), x);
            assert!((v - v2 * x * x - v3 * x * x * x).abs() < 50.0 * x.powi(4), "{x}");
        }
    }

    #[test]
    fn rejects_zero_frequency() {
        let m = WarpedMetric::hyperbolic(1, TAU, 1.0).unwrap();
        assert!(scattering_matrix_stationary(&m, Mode::one(0), 0.0).is_err());
    }
}

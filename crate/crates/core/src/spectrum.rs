//! Point-spectrum guard on (0, n²/4).
//!
//! An eigenvalue μ of Δ_g on mode k is a bound state of −w'' + V w = (μ − n²/4) w
//! that vanishes at the cap and decays like x^{γ}, γ = √(n²/4 − μ), at the boundary.

use alloc::format;
use alloc::vec::Vec;
use num_traits::Float;

use crate::error::{Error, Result};
use crate::metric::{Mode, WarpedMetric};
use crate::radial::shoot;

const MATCH_RHO: f64 = 24.0;
const SCAN_POINTS: usize = 160;

/// Coefficient of the growing branch e^{γρ} at the matching depth; vanishes at eigenvalues.
pub fn matching_determinant(m: &WarpedMetric, k: Mode, mu: f64) -> f64 {
    let nf = m.n as f64;
    let gamma = (0.25 * nf * nf - mu).max(0.0).sqrt();
    let (w, dw) = shoot(m, k, mu - 0.25 * nf * nf, MATCH_RHO);
    if gamma == 0.0 {
        return dw;
    }
    0.5 * (-gamma * MATCH_RHO).exp() * (w + dw / gamma)
}

fn check_interval(m: &WarpedMetric, interval: (f64, f64)) -> Result<()> {
    let top = 0.25 * (m.n * m.n) as f64;
    let (lo, hi) = interval;
    if !(lo > 0.0 && hi < top && lo < hi) {
        return Err(Error::InvalidParameter(format!("spectral interval ({lo}, {hi}) not inside (0, {top})")));
    }
    Ok(())
}

fn sign_changes(m: &WarpedMetric, k: Mode, lo: f64, hi: f64, points: usize) -> Vec<(f64, f64)> {
    let h = (hi - lo) / points as f64;
    let mut out = Vec::new();
    let mut prev = matching_determinant(m, k, lo);
    for i in 1..=points {
        let mu = lo + i as f64 * h;
        let cur = matching_determinant(m, k, mu);
        if prev == 0.0 || prev * cur < 0.0 {
            out.push((mu - h, mu));
        }
        prev = cur;
    }
    out
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = f(lo);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if flo * fm < 0.0 {
            hi = mid;
        } else {
            lo = mid;
            flo = fm;
        }
    }
    0.5 * (lo + hi)
}

/// Eigenvalues of Δ_g in `interval` on the given modes, located by shooting.
///
/// An empty result certifies the interval eigenvalue-free at the scan resolution.
pub fn find_point_spectrum(m: &WarpedMetric, modes: &[Mode], interval: (f64, f64)) -> Result<Vec<(Mode, f64)>> {
    check_interval(m, interval)?;
    let (lo, hi) = interval;
    let mut found = Vec::new();
    for &k in modes {
        let coarse = sign_changes(m, k, lo, hi, SCAN_POINTS);
        let fine = sign_changes(m, k, lo, hi, 2 * SCAN_POINTS);
        if coarse.len() != fine.len() {
            let mu = fine.first().or(coarse.first()).map(|b| b.0).unwrap_or(lo);
            return Err(Error::RootBracketingFailed { mu });
        }
        for (a, b) in fine {
            found.push((k, bisect(|mu| matching_determinant(m, k, mu), a, b)));
        }
    }
    Ok(found)
}

/// Eigenvalues in `interval` of the finite-difference radial operator on [ρ₀, `rho_end`],
/// Dirichlet at both ends, located by Sturm counts.
pub fn point_spectrum_fd(
    m: &WarpedMetric,
    k: Mode,
    interval: (f64, f64),
    rho_end: f64,
    nodes: usize,
) -> Result<Vec<f64>> {
    check_interval(m, interval)?;
    let top = 0.25 * (m.n * m.n) as f64;
    let rho0 = -m.x_max.ln();
    let h = (rho_end - rho0) / (nodes + 1) as f64;
    let diag: Vec<f64> =
        (1..=nodes).map(|i| 2.0 / (h * h) + m.radial_potential(k, (-(rho0 + i as f64 * h)).exp())).collect();
    let off = 1.0 / (h * h);
    let count_below = |e: f64| {
        let mut d = 1.0;
        let mut count = 0usize;
        for (i, &a) in diag.iter().enumerate() {
            d = if i == 0 { a - e } else { a - e - off * off / d };
            if d == 0.0 {
                d = 1e-300;
            }
            if d < 0.0 {
                count += 1;
            }
        }
        count
    };
    let (e_lo, e_hi) = (interval.0 - top, interval.1 - top);
    let n_lo = count_below(e_lo);
    let n_hi = count_below(e_hi);
    let mut out = Vec::new();
    for j in n_lo..n_hi {
        let (mut a, mut b) = (e_lo, e_hi);
        for _ in 0..80 {
            let mid = 0.5 * (a + b);
            if count_below(mid) > j {
                b = mid;
            } else {
                a = mid;
            }
        }
        out.push(0.5 * (a + b) + top);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::Profile;

    const TAU: f64 = 6.283185307179586;

    #[test]
    fn hyperbolic_cylinder_has_no_eigenvalues() {
        for n in [1, 2] {
            let m = WarpedMetric::hyperbolic(n, TAU, 1.0).unwrap();
            let top = 0.25 * (n * n) as f64;
            let modes = [Mode::one(0), Mode::one(1), Mode::one(3)];
            assert!(find_point_spectrum(&m, &modes, (1e-3, top - 1e-3)).unwrap().is_empty());
            for k in modes {
                let fd = point_spectrum_fd(&m, k, (1e-3, top - 1e-3), 60.0, 40000).unwrap();
                assert!(fd.is_empty());
            }
        }
    }

    #[test]
    fn desk_profiles_are_eigenvalue_free() {
        for p in [Profile::funnel(0.1), Profile::bump(0.05)] {
            for n in [1, 2] {
                let m = WarpedMetric::new(p, n, TAU, 1.0).unwrap();
                let top = 0.25 * (n * n) as f64;
                let found = find_point_spectrum(&m, &[Mode::one(0)], (1e-3, top - 1e-3)).unwrap();
                assert!(found.is_empty(), "{p:?} {n}: {found:?}");
            }
        }
    }

    #[test]
    fn steep_funnel_traps_a_state() {
        let m = WarpedMetric::new(Profile::funnel(200.0), 1, TAU, 1.0).unwrap();
        let found = find_point_spectrum(&m, &[Mode::one(0)], (1e-3, 0.249)).unwrap();
        let fd = point_spectrum_fd(&m, Mode::one(0), (1e-3, 0.249), 60.0, 40000).unwrap();
        assert_eq!(found.len(), 1);
        assert_eq!(fd.len(), 1);
        assert!((found[0].1 - fd[0]).abs() < 1e-3, "{found:?} {fd:?}");
    }

    #[test]
    fn interval_outside_continuum_gap_is_rejected() {
        let m = WarpedMetric::hyperbolic(1, TAU, 1.0).unwrap();
        assert!(matches!(find_point_spectrum(&m, &[Mode::one(0)], (0.1, 0.3)), Err(Error::InvalidParameter(_))));
        assert!(find_point_spectrum(&m, &[Mode::one(0)], (0.0, 0.2)).is_err());
    }
}

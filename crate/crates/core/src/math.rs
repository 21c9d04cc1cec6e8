//! Small numerical kernels shared by the solvers.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;
use num_traits::Float;

pub type C64 = Complex64;

/// Lagrange weights for value and first derivative at `x` on four distinct nodes.
pub fn lagrange4(xs: &[f64; 4], x: f64) -> ([f64; 4], [f64; 4]) {
    let mut w = [0.0; 4];
    let mut dw = [0.0; 4];
    for i in 0..4 {
        let mut den = 1.0;
        for j in 0..4 {
            if j != i {
                den *= xs[i] - xs[j];
            }
        }
        let mut num = 1.0;
        for j in 0..4 {
            if j != i {
                num *= x - xs[j];
            }
        }
        w[i] = num / den;
        let mut d = 0.0;
        for m in 0..4 {
            if m == i {
                continue;
            }
            let mut p = 1.0;
            for j in 0..4 {
                if j != i && j != m {
                    p *= x - xs[j];
                }
            }
            d += p;
        }
        dw[i] = d / den;
    }
    (w, dw)
}

/// Four-point stencil start for uniform samples `0..len` around fractional index `u`.
pub fn stencil_start(u: f64, len: usize) -> usize {
    let i = u.floor() as isize - 1;
    let hi = len as isize - 4;
    if hi < 0 {
        return 0;
    }
    i.clamp(0, hi) as usize
}

/// Cubic Lagrange interpolation of uniformly spaced samples at `x`.
/// Outside `[x0, x0 + (len-1) h]` the result is zero.
pub fn interp_uniform(values: &[C64], x0: f64, h: f64, x: f64) -> C64 {
    let len = values.len();
    if len == 0 {
        return C64::new(0.0, 0.0);
    }
    let u = (x - x0) / h;
    if u < -1e-9 || u > (len - 1) as f64 + 1e-9 {
        return C64::new(0.0, 0.0);
    }
    if len < 4 {
        let i = (u.round() as usize).min(len - 1);
        return values[i];
    }
    let i0 = stencil_start(u, len);
    let xs = [i0 as f64, (i0 + 1) as f64, (i0 + 2) as f64, (i0 + 3) as f64];
    let (w, _) = lagrange4(&xs, u);
    let mut acc = C64::new(0.0, 0.0);
    for j in 0..4 {
        acc += values[i0 + j] * w[j];
    }
    acc
}

/// Six-point Lagrange interpolation of uniformly spaced samples at `x`.
/// Outside `[x0, x0 + (len-1) h]` the result is zero.
pub fn interp_uniform6(values: &[C64], x0: f64, h: f64, x: f64) -> C64 {
    let len = values.len();
    let u = (x - x0) / h;
    if len < 6 || u < -1e-9 || u > (len - 1) as f64 + 1e-9 {
        return interp_uniform(values, x0, h, x);
    }
    let i0 = (u.floor() as isize - 2).clamp(0, len as isize - 6) as usize;
    let mut acc = C64::new(0.0, 0.0);
    for j in 0..6 {
        let mut w = 1.0;
        for m in 0..6 {
            if m != j {
                w *= (u - (i0 + m) as f64) / (j as f64 - m as f64);
            }
        }
        acc += values[i0 + j] * w;
    }
    acc
}

/// Six-point Lagrange interpolation with the stencil clamped to the samples, so that
/// points up to one step outside are extrapolated.
pub fn extrap_uniform6(values: &[C64], x0: f64, h: f64, x: f64) -> C64 {
    let len = values.len();
    if len < 6 {
        return interp_uniform(values, x0, h, x.clamp(x0, x0 + (len.max(1) - 1) as f64 * h));
    }
    let u = (x - x0) / h;
    let i0 = (u.floor() as isize - 2).clamp(0, len as isize - 6) as usize;
    let mut acc = C64::new(0.0, 0.0);
    for j in 0..6 {
        let mut w = 1.0;
        for m in 0..6 {
            if m != j {
                w *= (u - (i0 + m) as f64) / (j as f64 - m as f64);
            }
        }
        acc += values[i0 + j] * w;
    }
    acc
}

/// Gauss-Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    let n = order.max(1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let pi = core::f64::consts::PI;
    for i in 0..(n + 1) / 2 {
        let mut z = (pi * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let mut p0 = 1.0;
            let mut p1 = 0.0;
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Composite trapezoid rule for uniform spacing `h`.
pub fn trapezoid(values: &[f64], h: f64) -> f64 {
    match values.len() {
        0 | 1 => 0.0,
        n => {
            let inner: f64 = values[1..n - 1].iter().sum();
            h * (inner + 0.5 * (values[0] + values[n - 1]))
        }
    }
}

/// One classical Runge-Kutta step for a system of `N` complex unknowns.
pub fn rk4_step<const N: usize>(f: &impl Fn(f64, &[C64; N]) -> [C64; N], t: f64, y: &[C64; N], h: f64) -> [C64; N] {
    let add = |a: &[C64; N], b: &[C64; N], s: f64| {
        let mut out = *a;
        for i in 0..N {
            out[i] += b[i] * s;
        }
        out
    };
    let k1 = f(t, y);
    let k2 = f(t + 0.5 * h, &add(y, &k1, 0.5 * h));
    let k3 = f(t + 0.5 * h, &add(y, &k2, 0.5 * h));
    let k4 = f(t + h, &add(y, &k3, h));
    let mut out = *y;
    for i in 0..N {
        out[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (h / 6.0);
    }
    out
}

/// Smooth compactly supported bump with peak 1 at `center`, vanishing for |x-center| >= half_width.
pub fn smooth_bump(x: f64, center: f64, half_width: f64) -> f64 {
    let r = (x - center) / half_width;
    if r.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - r * r)).exp()
    }
}

/// Derivative of [`smooth_bump`] with respect to `x`.
pub fn smooth_bump_deriv(x: f64, center: f64, half_width: f64) -> f64 {
    let r = (x - center) / half_width;
    if r.abs() >= 1.0 {
        0.0
    } else {
        let d = 1.0 - r * r;
        -(1.0 - 1.0 / d).exp() * 2.0 * r / (d * d) / half_width
    }
}

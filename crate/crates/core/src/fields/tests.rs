use super::*;
use crate::energy::{energy_norm, shifted_laplacian};
use crate::grid::{Bump, DataSpec};
use crate::metric::Profile;

const TAU: f64 = 6.283185307179586;

fn spec(k: Mode, f1: Option<(f64, f64)>, f2: Option<(f64, f64)>) -> DataSpec {
    let mk = |c: Option<(f64, f64)>| {
        c.map(|(center, half_width)| vec![Bump { center, half_width, amplitude: C64::new(1.0, 0.0) }])
            .unwrap_or_default()
    };
    DataSpec { modes: vec![(k, mk(f1), mk(f2))] }
}

fn funnel() -> WarpedMetric {
    WarpedMetric::new(Profile::funnel(0.1), 1, TAU, 1.0).unwrap()
}

fn profiles() -> [WarpedMetric; 3] {
    [
        WarpedMetric::hyperbolic(1, TAU, 1.0).unwrap(),
        funnel(),
        WarpedMetric::new(Profile::bump(0.05), 1, TAU, 1.0).unwrap(),
    ]
}

#[test]
fn zero_data_gives_zero_field() {
    let m = funnel();
    let g = GridSpec::symmetric(4e-3, 4.0, 0.01, 1);
    let d = CauchyData::sample(&m, &g, &[Mode::one(1)], |_, _| (ZERO, ZERO));
    let f = forward_field(&m, &d, &g).unwrap();
    assert_eq!(f.max_abs(), 0.0);
    assert_eq!(field_norm(&f), 0.0);
    let inv = inverse_forward_field(&m, &f, &g).unwrap();
    assert_eq!(inv.modes[0].f2.iter().fold(0.0f64, |a, v| a.max(v.norm())), 0.0);
}

#[test]
fn field_vanishes_before_the_support_front() {
    for m in profiles() {
        let g = GridSpec::symmetric(4e-3, 4.0, 0.005, 2);
        let d = spec(Mode::one(2), Some((0.3, 0.08)), Some((0.4, 0.1))).sample(&m, &g);
        let x0 = d.support().unwrap().0;
        let f = forward_field(&m, &d, &g).unwrap();
        let v = f.mode(Mode::one(2)).unwrap();
        for (i, val) in v.iter().enumerate() {
            if f.s_at(i) < x0.ln() {
                assert!(val.norm() < 1e-12, "{}: s = {}", m.profile.name(), f.s_at(i));
            }
        }
        assert!(f.max_abs() > 1e-3);
    }
}

#[test]
fn forward_field_is_an_isometry() {
    for m in profiles() {
        let mut defects = Vec::new();
        for delta in [2e-3, 1e-3] {
            let g = GridSpec::symmetric(delta, 8.0, 2.5 * delta, 1);
            let d = spec(Mode::one(1), Some((0.35, 0.15)), Some((0.35, 0.12))).sample(&m, &g);
            let e = energy_norm(&m, &d).unwrap();
            let n2 = field_norm(&forward_field(&m, &d, &g).unwrap()).powi(2);
            defects.push((n2 - e).abs() / e);
        }
        assert!(defects[1] < 2e-3, "{defects:?}");
        assert!(defects[1] < defects[0], "{defects:?}");
    }
}

#[test]
fn backward_field_time_reversal() {
    let m = funnel();
    let g = GridSpec::symmetric(4e-3, 4.0, 0.01, 1);
    let k = Mode::one(1);
    let odd = spec(k, None, Some((0.35, 0.15))).sample(&m, &g);
    let even = spec(k, Some((0.4, 0.15)), None).sample(&m, &g);
    let fo = forward_field(&m, &odd, &g).unwrap();
    let fe = forward_field(&m, &even, &g).unwrap();
    let bo = backward_field(&m, &odd, &g).unwrap();
    let be = backward_field(&m, &even, &g).unwrap();
    assert_eq!(bo.kind, FieldKind::Backward);
    assert!(relative_distance(&bo, &fo.reflected().unwrap()).unwrap() < 1e-14);
    assert!(relative_distance(&be, &fe.reflected().unwrap().scaled(C64::new(-1.0, 0.0))).unwrap() < 1e-14);
    let mixed = odd.axpy(C64::new(1.0, 0.0), &even).unwrap();
    let bm = backward_field(&m, &mixed, &g).unwrap();
    let sum = bo.axpy(C64::new(1.0, 0.0), &be).unwrap();
    let gap = relative_distance(&bm, &sum).unwrap();
    assert!(gap < 1e-4, "{gap}");
}

#[test]
fn odd_inverse_round_trip() {
    let m = funnel();
    let g = GridSpec::symmetric(2e-3, 8.0, 0.005, 2);
    let d = spec(Mode::one(2), None, Some((0.35, 0.15))).sample(&m, &g);
    let f = forward_field(&m, &d, &g).unwrap();
    let back = inverse_forward_field(&m, &f, &g).unwrap();
    let (a, b) = (&d.modes[0].f2, &back.modes[0].f2);
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
    let den: f64 = a.iter().map(|x| x.norm_sqr()).sum();
    assert!((num / den).sqrt() < 10.0 * g.delta * g.delta, "{}", (num / den).sqrt());
}

#[test]
fn even_provenance_is_not_in_the_odd_range() {
    let m = funnel();
    let g = GridSpec::symmetric(2e-3, 8.0, 0.005, 1);
    let d = spec(Mode::one(1), Some((0.3, 0.1)), None).sample(&m, &g);
    let f = forward_field(&m, &d, &g).unwrap();
    assert!(matches!(inverse_forward_field(&m, &f, &g), Err(Error::NotInRange { .. })));
}

#[test]
fn full_inverse_recovers_both_components() {
    let m = WarpedMetric::new(Profile::bump(0.05), 1, TAU, 1.0).unwrap();
    let mut errs = Vec::new();
    for delta in [4e-3, 2e-3] {
        let g = GridSpec::symmetric(delta, 10.0, 2.5 * delta, 1);
        let d = spec(Mode::one(1), Some((0.3, 0.1)), Some((0.4, 0.12))).sample(&m, &g);
        let f = forward_field(&m, &d, &g).unwrap();
        let back = inverse_forward_field_full(&m, &f, &g).unwrap();
        let l2 = |a: &[C64], b: &[C64]| {
            let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
            let den: f64 = a.iter().map(|x| x.norm_sqr()).sum();
            (num / den).sqrt()
        };
        errs.push((l2(&d.modes[0].f1, &back.modes[0].f1), l2(&d.modes[0].f2, &back.modes[0].f2)));
    }
    assert!(errs[1].0 < 1e-2 && errs[1].1 < 1e-2, "{errs:?}");
    assert!(errs[1].0 < errs[0].0 && errs[1].1 < errs[0].1, "{errs:?}");
}

#[test]
fn evolution_round_trip_and_identity() {
    let m = funnel();
    let mut errs = Vec::new();
    for delta in [2e-3, 1e-3] {
        let g = GridSpec::symmetric(delta, 4.0, 0.01, 1);
        let d = spec(Mode::one(1), Some((0.35, 0.15)), Some((0.35, 0.12))).sample(&m, &g);
        let same = evolve_cauchy(&m, &d, &g, 0.0).unwrap();
        assert!(same.relative_max_diff(&d) < 2e-3, "{}", same.relative_max_diff(&d));
        let fwd = evolve_cauchy(&m, &d, &g, 0.3).unwrap();
        errs.push(evolve_cauchy(&m, &fwd, &g, -0.3).unwrap().relative_max_diff(&d));
    }
    assert!(errs[1] < 1e-2, "{errs:?}");
    assert!(errs[0] / errs[1] > 2.8, "{errs:?}");
}

#[test]
fn translation_property() {
    let m = funnel();
    let g = GridSpec::symmetric(2e-3, 8.0, 0.005, 1);
    let d = spec(Mode::one(1), Some((0.35, 0.15)), Some((0.35, 0.12))).sample(&m, &g);
    let f = forward_field(&m, &d, &g).unwrap();
    for tau in [0.1, 0.3] {
        let moved = forward_field(&m, &evolve_cauchy(&m, &d, &g, tau).unwrap(), &g).unwrap();
        let shifted = translate(&f, tau);
        let a = moved.mode(Mode::one(1)).unwrap();
        let b = shifted.mode(Mode::one(1)).unwrap();
        let limit = g.s_max - tau;
        let worst = (0..a.len()).filter(|&i| g.s_at(i) <= limit).map(|i| (a[i] - b[i]).norm()).fold(0.0, f64::max);
        assert!(worst < 0.02 * f.max_abs(), "tau {tau}: {worst}");
    }
}

#[test]
fn translate_preserves_norm() {
    let m = funnel();
    let g = GridSpec::symmetric(4e-3, 8.0, 0.01, 1);
    let d = spec(Mode::one(1), None, Some((0.35, 0.1))).sample(&m, &g);
    let f = forward_field(&m, &d, &g).unwrap();
    for tau in [0.5, -1.0, 0.123] {
        let r = field_norm(&translate(&f, tau)) / field_norm(&f);
        assert!((r - 1.0).abs() < 1e-6, "{tau}: {r}");
    }
}

#[test]
fn mollifier_filters() {
    let m = funnel();
    let g = GridSpec::symmetric(4e-3, 10.0, 0.005, 1);
    let d = spec(Mode::one(1), None, Some((0.35, 0.1))).sample(&m, &g);
    let f = forward_field(&m, &d, &g).unwrap();
    let narrow = convolve_s(&f, &Window::mollifier(0.02, g.ds)).unwrap();
    assert!(relative_distance(&narrow, &f).unwrap() < 0.01);
    let w = Window::mollifier(0.2, g.ds);
    let wide = convolve_s(&f, &w).unwrap();
    let s0 = d.support().unwrap().0.ln();
    let v = wide.mode(Mode::one(1)).unwrap();
    for (i, val) in v.iter().enumerate() {
        if wide.s_at(i) < s0 - w.radius() - 1e-9 {
            assert_eq!(*val, ZERO);
        }
    }
    let lambdas = lambda_grid(41, 8.0);
    let ff = fourier_field(&f, &lambdas).unwrap();
    let fw = fourier_field(&wide, &lambdas).unwrap();
    let scale = ff.modes[0].values.iter().fold(0.0f64, |a, v| a.max(v.norm()));
    for (i, &l) in lambdas.iter().enumerate() {
        let want = ff.modes[0].values[i] * w.transform(l);
        assert!((fw.modes[0].values[i] - want).norm() < 1e-5 * scale);
    }
}

#[test]
fn parseval() {
    let m = funnel();
    let g = GridSpec::symmetric(4e-3, 10.0, 0.01, 1);
    let d = spec(Mode::one(1), Some((0.3, 0.1)), Some((0.35, 0.1))).sample(&m, &g);
    let f = forward_field(&m, &d, &g).unwrap();
    let ff = fourier_field(&f, &lambda_grid(4001, 200.0)).unwrap();
    let r = ff.norm_sq() / field_norm(&f).powi(2);
    assert!((r - 1.0).abs() < 1e-3, "{r}");
}

#[test]
fn undecayed_tail_is_flagged() {
    let m = funnel();
    let g = GridSpec::symmetric(4e-3, 1.0, 0.01, 1);
    let d = spec(Mode::one(1), None, Some((0.35, 0.1))).sample(&m, &g);
    let f = forward_field(&m, &d, &g).unwrap();
    assert!(matches!(fourier_field(&f, &[0.0, 1.0]), Err(Error::TailNotDecayed { .. })));
}

#[test]
fn field_bounded_by_twice_energy() {
    for m in profiles() {
        let g = GridSpec::symmetric(4e-3, 8.0, 0.01, 2);
        for (c, w) in [(0.2, 0.05), (0.35, 0.15), (0.5, 0.1)] {
            let d = spec(Mode::one(2), None, Some((c, w))).sample(&m, &g);
            let f = forward_field(&m, &d, &g).unwrap();
            let e = energy_norm(&m, &d).unwrap();
            assert!(field_norm(&f) <= 2.0 * e.sqrt() * (1.0 + 1e-3));
        }
    }
}

#[test]
fn polynomial_filter_identity() {
    let m = funnel();
    let g = GridSpec::symmetric(1e-3, 12.0, 0.0025, 1);
    let d = spec(Mode::one(1), None, Some((0.35, 0.12))).sample(&m, &g);
    let pd = shifted_laplacian(&m, &d);
    let lambdas = lambda_grid(33, 4.0);
    let f = fourier_field(&forward_field(&m, &d, &g).unwrap(), &lambdas).unwrap();
    let pf = fourier_field(&forward_field(&m, &pd, &g).unwrap(), &lambdas).unwrap();
    let a = f.mode(Mode::one(1)).unwrap();
    let b = pf.mode(Mode::one(1)).unwrap();
    let scale = b.iter().fold(0.0f64, |acc, v| acc.max(v.norm()));
    for (i, &l) in lambdas.iter().enumerate() {
        let want = a[i] * (l * l);
        assert!((b[i] - want).norm() < 0.01 * scale, "{l}: {} vs {}", b[i], want);
    }
}

#[test]
fn velocity_growth_is_bounded() {
    let m = funnel();
    let g = GridSpec::symmetric(2e-3, 4.0, 0.01, 1);
    let d = spec(Mode::one(1), None, Some((0.35, 0.12))).sample(&m, &g);
    let c = 1.5 * velocity_norm(&m, &d);
    for t in [0.1, 0.2, 0.4] {
        let u = evolve_cauchy(&m, &d, &g, t).unwrap();
        assert!(velocity_norm(&m, &u) <= c * (0.5 * t).exp());
    }
}

mod props {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]

        #[test]
        fn forward_field_is_homogeneous(re in -2.0..2.0f64, im in -2.0..2.0f64, c in 0.3..0.55f64) {
            let m = funnel();
            let g = GridSpec::symmetric(4e-3, 4.0, 0.01, 1);
            let d = spec(Mode::one(1), Some((c, 0.12)), Some((c, 0.1))).sample(&m, &g);
            let z = C64::new(re, im);
            let f = forward_field(&m, &d, &g).unwrap();
            let fz = forward_field(&m, &d.scaled(z), &g).unwrap();
            let gap = fz.axpy(-z, &f).unwrap().max_abs();
            prop_assert!(gap <= 1e-12 * (1.0 + z.norm()) * f.max_abs());
        }

        #[test]
        fn translation_is_a_group_action(a in -0.5..0.5f64, b in -0.5..0.5f64) {
            let m = funnel();
            let g = GridSpec::symmetric(4e-3, 6.0, 0.01, 1);
            let d = spec(Mode::one(1), None, Some((0.35, 0.1))).sample(&m, &g);
            let f = forward_field(&m, &d, &g).unwrap();
            let two = translate(&translate(&f, a), b);
            let one = translate(&f, a + b);
            prop_assert!(relative_distance(&two, &one).unwrap() < 1e-3);
        }
    }
}

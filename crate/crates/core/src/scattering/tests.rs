use super::*;
use crate::fields::{backward_field, lambda_grid};
use crate::grid::{Bump, DataSpec};
use crate::metric::Profile;

const TAU: f64 = 6.283185307179586;

fn bump(center: f64, half_width: f64) -> Vec<Bump> {
    alloc::vec![Bump { center, half_width, amplitude: C64::new(1.0, 0.0) }]
}

fn funnel() -> WarpedMetric {
    WarpedMetric::new(Profile::funnel(0.1), 1, TAU, 1.0).unwrap()
}

fn data(m: &WarpedMetric, g: &GridSpec, k: Mode, f1: Vec<Bump>, f2: Vec<Bump>) -> CauchyData {
    DataSpec { modes: alloc::vec![(k, f1, f2)] }.sample(m, g)
}

#[test]
fn apply_to_zero_is_zero() {
    let m = funnel();
    let g = GridSpec::symmetric(4e-3, 6.0, 0.01, 1);
    let z = RadiationField::zero(&m, &g, &[Mode::one(1)], FieldKind::Backward);
    assert_eq!(scattering_apply(&m, &z, &g).unwrap().max_abs(), 0.0);
    assert_eq!(membership_mf(&m, &z, &g).unwrap(), 0.0);
    assert_eq!(membership_mb(&m, &z, &g).unwrap(), 0.0);
}

#[test]
fn apply_maps_backward_to_forward() {
    let m = funnel();
    let g = GridSpec::symmetric(2e-3, 10.0, 0.005, 2);
    let d = data(&m, &g, Mode::one(2), Vec::new(), bump(0.35, 0.15));
    let back = backward_field(&m, &d, &g).unwrap();
    let fwd = forward_field(&m, &d, &g).unwrap();
    let sf = scattering_apply(&m, &back, &g).unwrap();
    assert!(relative_distance(&sf, &fwd).unwrap() < 1e-4);
    let r = field_norm(&sf) / field_norm(&back);
    assert!((r - 1.0).abs() < 1e-3, "{r}");
}

#[test]
fn full_apply_preserves_norm() {
    let m = WarpedMetric::new(Profile::bump(0.05), 1, TAU, 1.0).unwrap();
    let g = GridSpec::symmetric(2e-3, 12.0, 0.005, 1);
    let d = data(&m, &g, Mode::one(1), bump(0.35, 0.15), bump(0.4, 0.12));
    let back = backward_field(&m, &d, &g).unwrap();
    let sf = scattering_apply_full(&m, &back, &g).unwrap();
    let r = field_norm(&sf) / field_norm(&back);
    assert!((r - 1.0).abs() < 0.01, "{r}");
    assert!(relative_distance(&sf, &forward_field(&m, &d, &g).unwrap()).unwrap() < 0.03);
}

#[test]
fn membership_residuals() {
    let m = funnel();
    let g = GridSpec::symmetric(2e-3, 12.0, 0.005, 1);
    let odd = forward_field(&m, &data(&m, &g, Mode::one(1), Vec::new(), bump(0.35, 0.15)), &g).unwrap();
    let even = forward_field(&m, &data(&m, &g, Mode::one(1), bump(0.35, 0.15), Vec::new()), &g).unwrap();
    let r_odd = membership_mf(&m, &odd, &g).unwrap();
    let r_even = membership_mf(&m, &even, &g).unwrap();
    assert!(r_odd < 0.03, "{r_odd}");
    assert!((r_even - 2.0).abs() < 0.06, "{r_even}");
    assert!(membership_mb(&m, &odd.reflected().unwrap(), &g).unwrap() < 0.03);
}

#[test]
fn dynamic_matches_stationary() {
    let lambdas = lambda_grid(33, 8.0);
    for m in [funnel(), WarpedMetric::new(Profile::bump(0.05), 1, TAU, 1.0).unwrap()] {
        let g = GridSpec::symmetric(2e-3, 12.0, 0.005, 4);
        for k in [0, 4] {
            let mode = Mode::one(k);
            let probe = data(&m, &g, mode, bump(0.3, 0.1), bump(0.35, 0.12));
            let dy = scattering_matrix_dynamic(&m, mode, &lambdas, &probe, &g).unwrap();
            let st = scattering_sample_stationary(&m, mode, &lambdas).unwrap();
            assert!(dy.max_relative_gap(&st, 0.5, 8.0).unwrap() < 0.02);
            assert!(dy.unitarity_defect() < 0.01, "{}", dy.unitarity_defect());
        }
    }
}

#[test]
fn dynamic_is_probe_independent() {
    let m = WarpedMetric::hyperbolic(1, TAU, 1.0).unwrap();
    let g = GridSpec::symmetric(2e-3, 12.0, 0.005, 0);
    let lambdas = lambda_grid(33, 8.0);
    let k = Mode::one(0);
    let p1 = data(&m, &g, k, bump(0.3, 0.1), bump(0.35, 0.12));
    let p2 = data(&m, &g, k, Vec::new(), bump(0.5, 0.15));
    let a1 = scattering_matrix_dynamic(&m, k, &lambdas, &p1, &g).unwrap();
    let a2 = scattering_matrix_dynamic(&m, k, &lambdas, &p2, &g).unwrap();
    assert!(a1.max_relative_gap(&a2, 0.5, 8.0).unwrap() < 0.01);
    for (i, &l) in lambdas.iter().enumerate() {
        let j = lambdas.len() - 1 - i;
        if !a1.masked[i] && !a1.masked[j] {
            assert!((a1.a[j] - a1.a[i].conj()).norm() < 1e-8, "{l}");
        }
    }
}

#[test]
fn stationary_branch_exchange() {
    let m = funnel();
    for k in [0, 2] {
        for l in [0.7, 2.5, 6.0] {
            let a = scattering_matrix_stationary(&m, Mode::one(k), l).unwrap();
            let b = scattering_matrix_stationary(&m, Mode::one(k), -l).unwrap();
            assert!((a * b - C64::new(1.0, 0.0)).norm() < 1e-8);
        }
    }
}

#[test]
fn probe_without_the_mode_is_deficient() {
    let m = funnel();
    let g = GridSpec::symmetric(4e-3, 6.0, 0.01, 2);
    let p = data(&m, &g, Mode::one(1), Vec::new(), bump(0.35, 0.15));
    let r = scattering_matrix_dynamic(&m, Mode::one(2), &[1.0], &p, &g);
    assert!(matches!(r, Err(Error::ProbeDeficient { .. })));
}

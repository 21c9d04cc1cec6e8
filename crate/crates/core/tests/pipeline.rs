use ahrad_core::energy::energy_norm;
use ahrad_core::fields::{backward_field, field_norm, forward_field, lambda_grid};
use ahrad_core::inverse::support_roundtrip;
use ahrad_core::scattering::{scattering_matrix_dynamic, scattering_sample_stationary};
use ahrad_core::{Bump, DataSpec, GridSpec, Mode, Profile, WarpedMetric, C64};

const TAU: f64 = std::f64::consts::TAU;

fn bump(center: f64, half_width: f64) -> Bump {
    Bump { center, half_width, amplitude: C64::new(0.8, -0.4) }
}

fn profiles() -> [Profile; 3] {
    [Profile::Hyperbolic, Profile::funnel(0.1), Profile::bump(0.05)]
}

#[test]
fn forward_and_backward_fields_carry_the_energy() {
    let g = GridSpec::symmetric(2e-3, 10.0, 0.01, 1);
    let spec = DataSpec { modes: vec![(Mode::one(1), vec![bump(0.4, 0.15)], vec![bump(0.35, 0.18)])] };
    for p in profiles() {
        let m = WarpedMetric::new(p, 1, TAU, 1.0).unwrap();
        let d = spec.sample(&m, &g);
        let e = energy_norm(&m, &d).unwrap();
        for f in [forward_field(&m, &d, &g).unwrap(), backward_field(&m, &d, &g).unwrap()] {
            let defect = (field_norm(&f).powi(2) - e).abs() / e;
            assert!(defect < 2e-3, "{p:?}: {defect:e}");
        }
    }
}

#[test]
fn support_front_and_scattering_agree_across_modules() {
    let g = GridSpec::symmetric(2e-3, 12.0, 0.005, 2);
    let m = WarpedMetric::new(Profile::funnel(0.1), 1, TAU, 1.0).unwrap();
    let k = Mode::one(2);
    let probe = DataSpec { modes: vec![(k, vec![bump(0.3, 0.1)], vec![bump(0.35, 0.12)])] };
    let d = probe.sample(&m, &g);
    assert!(support_roundtrip(&m, &d, &g).unwrap().cells() <= 5.0);
    let lambdas = lambda_grid(17, 8.0);
    let dynamic = scattering_matrix_dynamic(&m, k, &lambdas, &d, &g).unwrap();
    let stationary = scattering_sample_stationary(&m, k, &lambdas).unwrap();
    assert!(dynamic.max_relative_gap(&stationary, 0.5, 8.0).unwrap() < 0.02);
}

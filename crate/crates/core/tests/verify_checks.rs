use std::f64::consts::PI;

use hyperhelfrich::curve::CurvePoint;
use hyperhelfrich::profile::{integrate_profile, ModelParams};
use hyperhelfrich::shooting::residual_mean;
use hyperhelfrich::verify::{
    el_residual, el_residual_of, euler_helfrich_params, free_boundary_check, reflection_c3_check, rescaling_check,
    verify_profile,
};

fn circle_point(s: f64) -> CurvePoint {
    let (sin, cos) = s.sin_cos();
    CurvePoint {
        sigma: s,
        r: sin,
        z: cos,
        phi: -s,
        cos_phi: cos,
        sin_phi: -sin,
        dphi: -1.0,
        kappa_par: -1.0,
        nu3_over_z: 1.0,
    }
}

#[test]
fn el_residual_of_exact_circle_is_rounding_level() {
    let el = el_residual_of(&circle_point, 0.0, 0.01, 1.5, 128).unwrap();
    assert!(el.el_max < 1e-9, "{el:?}");
}

#[test]
fn el_residual_detects_perturbed_angle() {
    let bump = |s: f64| 1e-3 * (4.0 * s).sin();
    let perturbed = |s: f64| {
        let p = circle_point(s);
        let phi = p.phi + bump(s);
        let dphi = p.dphi + 4e-3 * (4.0 * s).cos();
        CurvePoint { phi, dphi, kappa_par: phi.sin() / p.r, cos_phi: phi.cos(), sin_phi: phi.sin(), ..p }
    };
    let el = el_residual_of(&perturbed, 0.0, 0.01, 1.5, 128).unwrap();
    assert!(el.el_max > 1e-2, "{el:?}");
}

#[test]
fn integrated_circle_el_residual() {
    let sol = integrate_profile(&ModelParams::new(0.0), 1.0).unwrap();
    assert!(el_residual(&sol).unwrap().el_max < 1e-6);
}

#[test]
fn short_window_is_rejected() {
    assert!(el_residual_of(&circle_point, 0.0, 0.5, 0.5, 64).is_err());
}

#[test]
fn mismatched_modulus_shifts_first_residual_linearly() {
    let p = ModelParams::new(1.0);
    let sol = integrate_profile(&p, 1.8526338192595626).unwrap();
    let (b, _) = euler_helfrich_params(sol.r_b, 1.0, 1.0).unwrap();
    let (r0, _) = free_boundary_check(&sol, 1.0, b, 1.0).unwrap();
    let (r1, _) = free_boundary_check(&sol, 1.0, b + 0.3, 1.0).unwrap();
    assert!(r0 < 1e-6);
    assert!((r1 - 0.3 / sol.r_b).abs() < 1e-6);
}

#[test]
fn non_equilibrium_profiles_fail_reflection_checks() {
    let p = ModelParams::new(1.0);
    let z0 = 2.6;
    let sol = integrate_profile(&p, z0).unwrap();
    let mean = residual_mean(&p, z0).unwrap();
    let rescaling = rescaling_check(&sol).unwrap();
    assert!((rescaling - 2.0 * mean.abs() * 2.0 * PI).abs() < 1e-8);
    let gap = reflection_c3_check(&sol).unwrap();
    assert!(gap >= sol.d2phi_b.abs() && gap > 1e-3);
    assert!(!verify_profile(&sol).unwrap().all_pass);
}

#[test]
fn first_equilibrium_passes_every_check() {
    let sol = integrate_profile(&ModelParams::new(1.0), 1.8526338192595626).unwrap();
    let report = verify_profile(&sol).unwrap();
    assert!(report.all_pass, "{report:?}");
    let json = serde_json::to_value(&report).unwrap();
    let keys: Vec<&str> = json.as_object().unwrap().keys().map(String::as_str).collect();
    for k in ["rme_max", "el_max", "orthogonality", "hz0", "dnH", "u_r_abs", "rescaling", "c3_gap", "kappa_g", "all_pass"] {
        assert!(keys.contains(&k), "missing {k}");
    }
}

//! Acceptance checks, one PASS/FAIL line per criterion.

use std::f64::consts::{FRAC_PI_2, PI};
use std::time::{Duration, Instant};

use hyperhelfrich::curve::{GeneratingCurve, Hemisphere};
use hyperhelfrich::functionals::{area_regularized, area_regularized_limit, energy_report, EnergyReport};
use hyperhelfrich::profile::{integrate_profile, trace_profile, ModelParams, Termination};
use hyperhelfrich::shooting::{find_equilibria, BranchEntry};
use hyperhelfrich::verify::{
    boundary_conditions, el_residual, euler_helfrich_params, free_boundary_check, gauss_bonnet_check,
    reflection_c3_check, rescaling_check,
};

struct Outcome {
    pass: bool,
    detail: String,
}

fn report(id: usize, name: &str, limit: Duration, run: impl FnOnce() -> Outcome) -> bool {
    let t = Instant::now();
    let out = run();
    let elapsed = t.elapsed();
    let pass = out.pass && elapsed < limit;
    println!(
        "criterion {id} {}: {name}: {} [{:.3} s, limit {} s]",
        if pass { "PASS" } else { "FAIL" },
        out.detail,
        elapsed.as_secs_f64(),
        limit.as_secs()
    );
    pass
}

/// Hemisphere energies from the closed forms A = −2π, U = −2πR,
/// W = 2π(c0R − 1)², excess = 2π(c0R)².
fn hemisphere_closed_form(r: f64, c0: f64) -> [f64; 5] {
    let a = -2.0 * PI;
    let u = -2.0 * PI * r;
    [a, u, a - 2.0 * c0 * u, 2.0 * PI * (c0 * r - 1.0).powi(2), 2.0 * PI * (c0 * r).powi(2)]
}

fn values(e: &EnergyReport) -> [f64; 5] {
    [e.a_r, e.u_r, e.g_r, e.helfrich, e.excess]
}

fn criterion_1() -> Outcome {
    let h = Hemisphere::new(1.0, 1.0).unwrap();
    let e = energy_report(&h).unwrap();
    let expected = hemisphere_closed_form(1.0, 1.0);
    let err = values(&e).iter().zip(expected).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let regular = area_regularized(&h).unwrap();
    let (limit, _) = area_regularized_limit(&h).unwrap();
    let gap = (regular - limit).abs();
    Outcome {
        pass: err < 1e-8 && gap < 1e-6,
        detail: format!("max energy error {err:.2e}, A_R method gap {gap:.2e}"),
    }
}

fn criterion_2(branches: &[BranchEntry]) -> Outcome {
    let mut worst_t1: f64 = 0.0;
    let mut min_slack = f64::INFINITY;
    let mut classify_ok = true;
    for r in [0.5, 1.0, 2.0] {
        for c0 in [0.0, 0.5, 1.0] {
            let e = energy_report(&Hemisphere::new(r, c0).unwrap()).unwrap();
            worst_t1 = worst_t1.max(e.theorem1_residual);
            min_slack = min_slack.min(e.slack());
            // the hemisphere solves the reduced equation only for c0 = 0
            let rme = c0 == 0.0;
            classify_ok &= (e.slack() < 1e-7) == rme;
        }
    }
    let mut eq_slack: f64 = 0.0;
    for b in branches {
        worst_t1 = worst_t1.max(b.energies.theorem1_residual);
        min_slack = min_slack.min(b.energies.slack());
        eq_slack = eq_slack.max(b.energies.slack());
    }
    classify_ok &= eq_slack < 1e-7;
    Outcome {
        pass: worst_t1 < 1e-7 && min_slack >= -1e-9 && classify_ok,
        detail: format!(
            "max theorem residual {worst_t1:.2e}, min slack {min_slack:.2e}, max equilibrium slack {eq_slack:.2e}, slack classifies RME {classify_ok}"
        ),
    }
}

fn criterion_3() -> Outcome {
    let mut sup: f64 = 0.0;
    let mut area_err: f64 = 0.0;
    for z0 in [0.5, 1.0, 3.0] {
        let sol = integrate_profile(&ModelParams::new(0.0), z0).unwrap();
        let n = 4000;
        let pts = (0..=n).map(|i| sol.sigma_b * i as f64 / n as f64).chain(sol.samples.iter().map(|s| s.sigma));
        for s in pts {
            let p = sol.point(s);
            // circle of radius z0 centred at the origin, arc length from the pole
            let t = s / z0;
            sup = sup.max((p.r - z0 * t.sin()).abs()).max((p.z - z0 * t.cos()).abs()).max((p.phi + t).abs());
        }
        sup = sup.max((sol.sigma_b - FRAC_PI_2 * z0).abs());
        area_err = area_err.max((area_regularized(&sol).unwrap() + 2.0 * PI).abs());
    }
    Outcome {
        pass: sup < 1e-8 && area_err < 1e-8,
        detail: format!("sup-norm distance to circles {sup:.2e}, max |A_R + 2pi| {area_err:.2e}"),
    }
}

fn criterion_4(branches: &[BranchEntry]) -> Outcome {
    let mut ok = branches.len() == 6;
    let mut worst = [0.0f64; 5];
    let mut min_order = f64::INFINITY;
    let mut min_neg_g = f64::INFINITY;
    for b in branches {
        let e = &b.energies;
        let bc = boundary_conditions(&b.profile).unwrap();
        let el = el_residual(&b.profile).unwrap();
        let checks = [e.u_r.abs(), bc.dnh, (-e.g_r - e.helfrich).abs(), el.el_max, b.profile.d2phi_b.abs()];
        for (w, c) in worst.iter_mut().zip(checks) {
            *w = w.max(c);
        }
        min_order = min_order.min(el.order);
        min_neg_g = min_neg_g.min(-e.g_r);
    }
    ok &= worst[0] < 1e-6 && worst[1] < 1e-6 && worst[2] < 1e-6 && worst[3] < 1e-5 && worst[4] < 2e-6;
    ok &= min_order >= 2.0 && min_neg_g >= 0.0;
    let roots: Vec<String> = branches.iter().map(|b| format!("{:.6}", b.z0_root)).collect();
    Outcome {
        pass: ok,
        detail: format!(
            "{} roots [{}], max |U_R| {:.2e}, max dnH {:.2e}, max |-G_R - W| {:.2e}, max el {:.2e}, min order {:.2}, max |phi''_b| {:.2e}, min -G_R {:.4}",
            branches.len(),
            roots.join(", "),
            worst[0],
            worst[1],
            worst[2],
            worst[3],
            min_order,
            worst[4],
            min_neg_g
        ),
    }
}

fn criterion_5() -> Outcome {
    let mut worst = [0.0f64; 4];
    let mut hit = 0;
    let mut fd_gap: f64 = 0.0;
    for c0 in [0.0, 0.3, 1.0, 2.5] {
        for z0 in [0.35, 0.9, 1.7, 3.2, -6.0] {
            let sol = match trace_profile(&ModelParams::new(c0), z0) {
                Ok(s) if s.termination == Termination::HitBoundary => s,
                _ => continue,
            };
            hit += 1;
            let bc = boundary_conditions(&sol).unwrap();
            let c = sol.c0;
            let rel = (sol.dphi_b - (2.0 * c - 1.0 / sol.r_b)).abs();
            for (w, v) in worst.iter_mut().zip([bc.orthogonality, bc.hz0, rel, bc.kappa_g]) {
                *w = w.max(v);
            }
            // one-sided difference of φ from the dense output
            let h = 1e-3 * sol.sigma_b.min(1.0);
            let sb = sol.sigma_b;
            let phi = |s: f64| sol.point(s).phi;
            let fd = (25.0 * phi(sb) - 48.0 * phi(sb - h) + 36.0 * phi(sb - 2.0 * h) - 16.0 * phi(sb - 3.0 * h)
                + 3.0 * phi(sb - 4.0 * h))
                / (12.0 * h);
            fd_gap = fd_gap.max((fd - (2.0 * c - 1.0 / sol.r_b)).abs() / (1.0 + sol.dphi_b.abs()));
        }
    }
    Outcome {
        pass: hit > 0 && worst[0] < 1e-6 && worst[1] < 1e-6 && worst[2] < 1e-6 && worst[3] < 1e-8,
        detail: format!(
            "{hit}/20 reached the plane, max orthogonality {:.2e}, hz0 {:.2e}, phi' relation {:.2e}, kappa_g {:.2e}, difference-quotient cross-check {:.2e}",
            worst[0], worst[1], worst[2], worst[3], fd_gap
        ),
    }
}

fn criterion_6(branches: &[BranchEntry]) -> Outcome {
    let mut worst = [0.0f64; 4];
    for b in branches {
        let p = &b.profile;
        let vals = [
            reflection_c3_check(p).unwrap(),
            rescaling_check(p).unwrap(),
            (gauss_bonnet_check(p, true).unwrap() - 4.0 * PI).abs(),
            (gauss_bonnet_check(p, false).unwrap() - 2.0 * PI).abs(),
        ];
        for (w, v) in worst.iter_mut().zip(vals) {
            *w = w.max(v);
        }
    }
    Outcome {
        pass: branches.len() == 6 && worst.iter().all(|&w| w < 1e-6),
        detail: format!(
            "max c3 gap {:.2e}, rescaling {:.2e}, |GB doubled - 4pi| {:.2e}, |GB half - 2pi| {:.2e}",
            worst[0], worst[1], worst[2], worst[3]
        ),
    }
}

fn criterion_7(branches: &[BranchEntry]) -> Outcome {
    let mut worst: f64 = 0.0;
    let mut param_gap: f64 = 0.0;
    for br in branches {
        let p = &br.profile;
        let (b, ratio) = euler_helfrich_params(p.r_b, p.c0, 1.0).unwrap();
        param_gap = param_gap.max((b - (2.0 * p.c0 * p.r_b - 1.0)).abs()).max((ratio - p.r_b * p.r_b).abs());
        let (r1, r2) = free_boundary_check(p, 1.0, b, p.c0).unwrap();
        worst = worst.max(r1).max(r2);
    }
    Outcome {
        pass: branches.len() == 6 && worst < 1e-6 && param_gap < 1e-14,
        detail: format!("max free-boundary residual {worst:.2e}, parameter formula gap {param_gap:.1e}"),
    }
}

fn criterion_8(branches: &[BranchEntry]) -> Outcome {
    let hemi = -energy_report(&Hemisphere::new(1.0, 1.0).unwrap()).unwrap().g_r;
    let min_eq = branches.iter().map(|b| -b.energies.g_r).fold(f64::INFINITY, f64::min);
    let all_nonneg = branches.iter().all(|b| -b.energies.g_r >= 0.0);
    Outcome {
        pass: (hemi + 2.0 * PI).abs() < 1e-8 && hemi < min_eq && all_nonneg && branches.len() == 6,
        detail: format!("-G_R(hemisphere) = {hemi:.10}, min over equilibria {min_eq:.6}"),
    }
}

fn main() {
    let secs = Duration::from_secs;
    let mut all = true;
    all &= report(1, "hemisphere oracle", secs(1), criterion_1);

    let t = Instant::now();
    let branches = find_equilibria(&ModelParams::new(1.0), 6).unwrap_or_default();
    let find_time = t.elapsed();

    all &= report(2, "regularized identity and inequality", secs(10), || criterion_2(&branches));
    all &= report(3, "circle solutions for c0 = 0", secs(1), criterion_3);
    all &= report(4, "six equilibria for c0 = 1", secs(60), || {
        let mut o = criterion_4(&branches);
        o.detail = format!("{} (search {:.3} s)", o.detail, find_time.as_secs_f64());
        o
    });
    all &= report(5, "boundary relations", secs(10), criterion_5);
    all &= report(6, "reflected surfaces", secs(10), || criterion_6(&branches));
    all &= report(7, "free-boundary parameters", secs(1), || criterion_7(&branches));
    all &= report(8, "hemisphere below every equilibrium", secs(1), || criterion_8(&branches));

    if !all {
        std::process::exit(1);
    }
}

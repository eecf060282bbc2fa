//! Pointwise and integral certificates for computed profiles.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::Serialize;

use crate::curve::{CurvePoint, GeneratingCurve};
use crate::functionals::potential_regularized;
use crate::profile::{boundary_trace, integrate_profile, ProfileSolution};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    pub rme: f64,
    pub el: f64,
    pub el_order: f64,
    pub orthogonality: f64,
    pub hz0: f64,
    #[serde(rename = "dnH")]
    pub dnh: f64,
    pub u_r: f64,
    pub rescaling: f64,
    pub c3: f64,
    pub kappa_g: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            rme: 1e-8,
            el: 1e-5,
            el_order: 2.0,
            orthogonality: 1e-6,
            hz0: 1e-6,
            dnh: 1e-6,
            u_r: 1e-6,
            rescaling: 1e-6,
            c3: 1e-6,
            kappa_g: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub rme_max: f64,
    pub el_max: f64,
    pub orthogonality: f64,
    pub hz0: f64,
    #[serde(rename = "dnH")]
    pub dnh: f64,
    pub u_r_abs: f64,
    pub rescaling: f64,
    pub c3_gap: f64,
    pub kappa_g: f64,
    pub all_pass: bool,
    pub tolerances: Tolerances,
    #[serde(skip)]
    pub tau_g: f64,
    #[serde(skip)]
    pub el_order: f64,
    #[serde(skip)]
    pub dphi_gap: f64,
    #[serde(skip)]
    pub gauss_bonnet_half: f64,
    #[serde(skip)]
    pub gauss_bonnet_doubled: f64,
}

/// Observed EL residuals on a sequence of refined grids.
#[derive(Debug, Clone, PartialEq)]
pub struct ElResidual {
    pub el_max: f64,
    pub order: f64,
    /// (grid step, sup of the residual) from coarse to fine.
    pub levels: Vec<(f64, f64)>,
}

/// Finite-difference weights for derivatives 0..=m at `x0` from `nodes`.
pub fn fd_weights(x0: f64, nodes: &[f64], m: usize) -> Vec<Vec<f64>> {
    let n = nodes.len();
    let mut c = vec![vec![0.0; n]; m + 1];
    let mut c1 = 1.0;
    let mut c4 = nodes[0] - x0;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i] - x0;
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

fn el_max_on_grid(
    point: &dyn Fn(f64) -> CurvePoint,
    c0: f64,
    start: f64,
    end: f64,
    n: usize,
) -> f64 {
    let h = end / n as f64;
    let j_min = (start / h).ceil() as i64;
    let j_max = n as i64;
    let h_vals: Vec<f64> = (-2..=j_max).map(|j| point((j as f64 * h).abs()).mean_curvature()).collect();
    let hv = |j: i64| h_vals[(j + 2) as usize];
    let mut worst: f64 = 0.0;
    for j in j_min.max(0)..=j_max {
        let nodes: Vec<i64> = if j + 2 <= j_max { (j - 2..=j + 2).collect() } else { (j_max - 5..=j_max).collect() };
        let x: Vec<f64> = nodes.iter().map(|&k| k as f64).collect();
        let w = fd_weights(j as f64, &x, 2);
        let d1: f64 = nodes.iter().zip(&w[1]).map(|(&k, c)| c * hv(k)).sum::<f64>() / h;
        let d2: f64 = nodes.iter().zip(&w[2]).map(|(&k, c)| c * hv(k)).sum::<f64>() / (h * h);
        let p = point(j as f64 * h);
        let hh = p.mean_curvature();
        let lap = if j == 0 { 2.0 * d2 } else { d2 + p.cos_phi / p.r * d1 };
        let res = lap + 2.0 * (hh + c0) * (hh * (hh - c0) - p.gauss_curvature());
        worst = worst.max(res.abs());
    }
    worst
}

/// EL residual of an arbitrary curve parametrisation on [start, end],
/// measured on grids of `n0`, `2 n0` and `4 n0` intervals of [0, end].
pub fn el_residual_of(
    point: &dyn Fn(f64) -> CurvePoint,
    c0: f64,
    start: f64,
    end: f64,
    n0: usize,
) -> Result<ElResidual> {
    if !(end > start) || end / n0 as f64 * 6.0 > end - start {
        return Err(Error::WindowEmpty);
    }
    let levels: Vec<(f64, f64)> = (0..3)
        .map(|k| {
            let n = n0 << k;
            (end / n as f64, el_max_on_grid(point, c0, start, end, n))
        })
        .collect();
    let (e0, e2) = (levels[0].1, levels[2].1);
    let order = if e2 > 0.0 && e0 > 0.0 { 0.5 * (e0 / e2).log2() } else { f64::INFINITY };
    Ok(ElResidual { el_max: e2, order, levels })
}

/// End of the EL window: arc length where the profile reaches 10 z_cutoff.
fn el_window(sol: &ProfileSolution) -> (f64, f64) {
    let z_stop = 10.0 * sol.params.z_cutoff_factor * sol.z0;
    let end = sol.point_at_height(z_stop).sigma;
    (2.0 * sol.sigma0(), end)
}

/// EL residual of the profile, re-integrated at a thousandfold tighter
/// tolerance so that finite differences resolve the truncation error.
pub fn el_residual(sol: &ProfileSolution) -> Result<ElResidual> {
    if !sol.is_boundary() {
        return Err(Error::NoBoundaryData);
    }
    let p = sol.params;
    let fine_params = p.with_tolerances((1e-3 * p.abs_tol).max(1e-13), (1e-3 * p.rel_tol).max(1e-13));
    let fine = integrate_profile(&fine_params, sol.input_z0())?;
    let (start, end) = el_window(&fine);
    let n0 = ((end / 0.015).ceil() as usize).max(64);
    el_residual_of(&|s| fine.point(s), fine.c0, start, end, n0)
}

/// Maximum of |H + c₀ + ν₃/z| over the samples and a uniform grid.
pub fn rme_max(sol: &ProfileSolution) -> f64 {
    let c0 = sol.c0;
    let n = 2000;
    let sb = sol.sigma_b();
    let grid = (1..n).map(|i| sb * i as f64 / n as f64);
    let samples = sol.samples.iter().map(|s| s.sigma).filter(|&s| s > 0.0 && s < sb);
    samples
        .chain(grid)
        .map(|s| {
            let p = sol.point(s);
            (p.mean_curvature() + c0 + p.nu3_over_z).abs()
        })
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundaryChecks {
    pub orthogonality: f64,
    pub hz0: f64,
    #[serde(rename = "dnH")]
    pub dnh: f64,
    pub kappa_g: f64,
    pub tau_g: f64,
}

pub fn boundary_conditions(sol: &ProfileSolution) -> Result<BoundaryChecks> {
    let b = boundary_trace(sol)?;
    let h_b = 0.5 * (b.dphi_b - 1.0 / b.r_b);
    let kappa_n = -1.0 / b.r_b;
    Ok(BoundaryChecks {
        orthogonality: (b.phi_b + FRAC_PI_2).abs(),
        hz0: (h_b - kappa_n - sol.c0).abs(),
        dnh: (0.5 * b.d2phi_b).abs(),
        kappa_g: b.phi_b.cos().abs() / b.r_b,
        tau_g: 0.0,
    })
}

/// 2π |∫(H + c₀) dσ-weighted| over the doubled surface.
pub fn rescaling_check(sol: &ProfileSolution) -> Result<f64> {
    boundary_trace(sol)?;
    let c0 = sol.c0;
    let doubled = Doubled(sol);
    Ok(2.0 * PI * doubled.integrate(&|p| (p.mean_curvature() + c0) * p.r).abs())
}

/// |φ″_b| plus the jump of ∂H/∂σ across the reflection plane.
pub fn reflection_c3_check(sol: &ProfileSolution) -> Result<f64> {
    let b = boundary_trace(sol)?;
    let h = 1e-2 * b.sigma_b.min(1.0);
    let end = sol.sigma_b();
    let nodes: Vec<f64> = (0..5).map(|k| -(k as f64)).collect();
    let w = fd_weights(0.0, &nodes, 1);
    let left: f64 = nodes
        .iter()
        .zip(&w[1])
        .map(|(k, c)| c * sol.point(end + k * h).mean_curvature())
        .sum::<f64>()
        / h;
    // the mirrored half carries H(2σ_b − σ), whose slope is −left
    let jump = (left - (-left)).abs();
    Ok(b.d2phi_b.abs() + jump)
}

pub fn gauss_bonnet_check(sol: &ProfileSolution, doubled: bool) -> Result<f64> {
    boundary_trace(sol)?;
    let f = |p: &CurvePoint| p.gauss_curvature() * p.r;
    let total = if doubled { Doubled(sol).integrate(&f) } else { sol.integrate(&f) };
    Ok(2.0 * PI * total)
}

/// Gaussian modulus b and α/β making a profile with boundary radius `r_b`
/// an Euler–Helfrich and free-boundary equilibrium.
pub fn euler_helfrich_params(r_b: f64, c0: f64, a: f64) -> Result<(f64, f64)> {
    if !(r_b > 0.0) {
        return Err(Error::NonPositiveRadius(r_b));
    }
    if !(a > 0.0) {
        return Err(Error::NonPositiveModulus(a));
    }
    Ok((2.0 * a * c0 * r_b - a, r_b * r_b))
}

/// (|a(H_b + c₀) + b κₙ|, |∂ₙH|) at the boundary.
pub fn free_boundary_check(sol: &ProfileSolution, a: f64, b: f64, c0: f64) -> Result<(f64, f64)> {
    let t = boundary_trace(sol)?;
    let h_b = 0.5 * (t.dphi_b - 1.0 / t.r_b);
    let kappa_n = -1.0 / t.r_b;
    Ok(((a * (h_b + c0) + b * kappa_n).abs(), t.dh_dn.abs()))
}

/// Profile followed by its mirror image under z ↦ −z.
pub struct Doubled<'a, C: GeneratingCurve + ?Sized>(pub &'a C);

impl<C: GeneratingCurve + ?Sized> Doubled<'_, C> {
    fn mirror(p: CurvePoint, sigma: f64) -> CurvePoint {
        CurvePoint {
            sigma,
            z: -p.z,
            phi: PI - p.phi,
            cos_phi: -p.cos_phi,
            nu3_over_z: p.nu3_over_z,
            ..p
        }
    }

    pub fn sigma_total(&self) -> f64 {
        2.0 * self.0.sigma_b()
    }

    pub fn point(&self, sigma: f64) -> CurvePoint {
        let sb = self.0.sigma_b();
        if sigma <= sb {
            self.0.point(sigma)
        } else {
            Self::mirror(self.0.point(2.0 * sb - sigma), sigma)
        }
    }

    pub fn integrate(&self, f: &dyn Fn(&CurvePoint) -> f64) -> f64 {
        let upper = self.0.integrate(f);
        let sb = self.0.sigma_b();
        let lower = self.0.integrate(&|p| f(&Self::mirror(*p, 2.0 * sb - p.sigma)));
        upper + lower
    }
}

pub fn verify_profile(sol: &ProfileSolution) -> Result<VerificationReport> {
    verify_with(sol, &Tolerances::default())
}

pub fn verify_with(sol: &ProfileSolution, tol: &Tolerances) -> Result<VerificationReport> {
    let bc = boundary_conditions(sol)?;
    let el = el_residual(sol)?;
    let rme = rme_max(sol);
    let u_r_abs = potential_regularized(sol)?.abs();
    let rescaling = rescaling_check(sol)?;
    let c3_gap = reflection_c3_check(sol)?;
    let dphi_gap = (sol.dphi_b - (2.0 * sol.c0 - 1.0 / sol.r_b)).abs();
    let all_pass = rme < tol.rme
        && el.el_max < tol.el
        && el.order >= tol.el_order
        && bc.orthogonality < tol.orthogonality
        && bc.hz0 < tol.hz0
        && bc.dnh < tol.dnh
        && u_r_abs < tol.u_r
        && rescaling < tol.rescaling
        && c3_gap < tol.c3
        && bc.kappa_g < tol.kappa_g;
    Ok(VerificationReport {
        rme_max: rme,
        el_max: el.el_max,
        orthogonality: bc.orthogonality,
        hz0: bc.hz0,
        dnh: bc.dnh,
        u_r_abs,
        rescaling,
        c3_gap,
        kappa_g: bc.kappa_g,
        all_pass,
        tolerances: *tol,
        tau_g: bc.tau_g,
        el_order: el.order,
        dphi_gap,
        gauss_bonnet_half: gauss_bonnet_check(sol, false)?,
        gauss_bonnet_doubled: gauss_bonnet_check(sol, true)?,
    })
}

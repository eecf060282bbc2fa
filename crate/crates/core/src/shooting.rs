//! Equilibrium initial heights by bracketing scans and Brent refinement.

use rayon::prelude::*;
use serde::Serialize;

use crate::curve::GeneratingCurve;
use crate::functionals::{energy_report, EnergyReport};
use crate::profile::{integrate_profile, ModelParams, ProfileSolution};
use crate::quadrature::brent;
use crate::verify::{verify_profile, VerificationReport};
use crate::{Error, Result};

/// Residual tolerance of a refined root.
pub const ROOT_TOL: f64 = 1e-8;
/// Scan samples per doubling of z0.
pub const SAMPLES_PER_DOUBLING: usize = 48;
/// Doublings scanned by [`find_equilibria`] before giving up.
pub const MAX_DOUBLINGS: usize = 20;

/// ∫₀^{σ_b} (H + c₀) r dσ of the profile started at `z0`.
pub fn residual_mean(params: &ModelParams, z0: f64) -> Result<f64> {
    if params.c0 == 0.0 {
        return Err(Error::C0Zero);
    }
    let sol = integrate_profile(params, z0)?;
    Ok(mean_of(&sol))
}

pub(crate) fn mean_of(sol: &ProfileSolution) -> f64 {
    let c0 = sol.c0;
    sol.integrate(&|p| (p.mean_curvature() + c0) * p.r)
}

/// φ″ at the boundary of the profile started at `z0`.
pub fn residual_phi2(params: &ModelParams, z0: f64) -> Result<f64> {
    Ok(integrate_profile(params, z0)?.d2phi_b)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
    pub f_lo: f64,
    pub f_hi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanFailure {
    pub z0: f64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanResult {
    pub brackets: Vec<Bracket>,
    pub failures: Vec<ScanFailure>,
    /// Set for c0 = 0, where every initial height gives an equilibrium.
    pub degenerate: bool,
}

/// `n` points from `z_min` to `z_max` in geometric progression, endpoints exact.
pub fn geometric_grid(z_min: f64, z_max: f64, n: usize) -> Vec<f64> {
    let ratio = (z_max / z_min).ln();
    (0..n)
        .map(|i| match i {
            0 => z_min,
            _ if i == n - 1 => z_max,
            _ => z_min * (ratio * i as f64 / (n - 1) as f64).exp(),
        })
        .collect()
}

fn brackets_on(params: &ModelParams, grid: &[f64]) -> (Vec<Bracket>, Vec<ScanFailure>) {
    let values: Vec<Result<f64>> = grid.par_iter().map(|&z| residual_mean(params, z)).collect();
    let mut failures = Vec::new();
    let mut good: Vec<(f64, f64)> = Vec::new();
    for (&z, v) in grid.iter().zip(values) {
        match v {
            Ok(f) => good.push((z, f)),
            Err(e) => failures.push(ScanFailure { z0: z, reason: e.to_string() }),
        }
    }
    let brackets = good
        .windows(2)
        .filter(|w| (w[0].1 < 0.0) != (w[1].1 < 0.0) || w[0].1 == 0.0)
        .map(|w| Bracket { lo: w[0].0, hi: w[1].0, f_lo: w[0].1, f_hi: w[1].1 })
        .collect();
    (brackets, failures)
}

/// Sign changes of the mean residual on a geometric grid over [z_min, z_max].
pub fn scan_brackets(params: &ModelParams, z_min: f64, z_max: f64, n_samples: usize) -> Result<ScanResult> {
    params.validate()?;
    if !(z_min < z_max) || !(z_min > 0.0) {
        return Err(Error::EmptyRange { z_min, z_max });
    }
    if n_samples < 2 {
        return Err(Error::InvalidParameter("n_samples must be at least 2".into()));
    }
    if params.c0 == 0.0 {
        return Ok(ScanResult { brackets: Vec::new(), failures: Vec::new(), degenerate: true });
    }
    let (brackets, failures) = brackets_on(params, &geometric_grid(z_min, z_max, n_samples));
    Ok(ScanResult { brackets, failures, degenerate: false })
}

/// Root of the mean residual inside a bracket.
pub fn refine_root(params: &ModelParams, bracket: &Bracket) -> Result<f64> {
    if bracket.lo == bracket.hi {
        return Ok(bracket.lo);
    }
    let f_lo = residual_mean(params, bracket.lo)?;
    let f_hi = residual_mean(params, bracket.hi)?;
    if (f_lo < 0.0) == (f_hi < 0.0) && f_lo != 0.0 && f_hi != 0.0 {
        return Err(Error::LostBracket { z0: bracket.lo });
    }
    let xtol = 1e-13 * bracket.lo.abs().max(bracket.hi.abs());
    let root = brent(|z| residual_mean(params, z), bracket.lo, bracket.hi, f_lo, f_hi, xtol, 0.0, 200)?;
    Ok(root.root)
}

#[derive(Debug, Clone)]
pub struct BranchEntry {
    pub index: usize,
    pub z0_root: f64,
    pub profile: ProfileSolution,
    pub energies: EnergyReport,
    pub verification: VerificationReport,
}

/// JSON form of a branch entry.
#[derive(Debug, Clone, Serialize)]
pub struct BranchRecord {
    pub index: usize,
    pub z0_root: f64,
    pub r_b: f64,
    pub sigma_b: f64,
    pub residual_mean: f64,
    pub residual_phi2: f64,
    pub energies: EnergyReport,
    pub verification: VerificationReport,
    pub params: ModelParams,
    pub scan_window: [f64; 2],
}

impl BranchEntry {
    pub fn new(index: usize, params: &ModelParams, z0_root: f64) -> Result<Self> {
        let profile = integrate_profile(params, z0_root)?;
        let energies = energy_report(&profile)?;
        let verification = verify_profile(&profile)?;
        Ok(Self { index, z0_root, profile, energies, verification })
    }

    pub fn record(&self, scan_window: [f64; 2]) -> BranchRecord {
        BranchRecord {
            index: self.index,
            z0_root: self.z0_root,
            r_b: self.profile.r_b,
            sigma_b: self.profile.sigma_b,
            residual_mean: mean_of(&self.profile),
            residual_phi2: self.profile.d2phi_b,
            energies: self.energies,
            verification: self.verification.clone(),
            params: self.profile.params,
            scan_window,
        }
    }
}

/// Lower end of the equilibrium scan.
pub fn scan_start(c0: f64) -> f64 {
    0.02 / c0
}

/// First `count` equilibria in increasing z0, with the scanned window.
pub fn find_equilibria_with_window(params: &ModelParams, count: usize) -> Result<(Vec<BranchEntry>, [f64; 2])> {
    params.validate()?;
    if params.c0 == 0.0 {
        return Err(Error::C0Zero);
    }
    if count == 0 {
        return Err(Error::InvalidParameter("count must be at least 1".into()));
    }
    let z_lo = scan_start(params.c0);
    let mut roots = Vec::new();
    let mut z_hi = z_lo;
    for d in 0..MAX_DOUBLINGS {
        let a = z_lo * 2f64.powi(d as i32);
        let grid: Vec<f64> = (0..=SAMPLES_PER_DOUBLING)
            .map(|j| a * 2f64.powf(j as f64 / SAMPLES_PER_DOUBLING as f64))
            .collect();
        z_hi = grid[grid.len() - 1];
        let (brackets, _) = brackets_on(params, &grid);
        let found: Vec<Result<f64>> = brackets.par_iter().map(|b| refine_root(params, b)).collect();
        for r in found {
            roots.push(r?);
        }
        if roots.len() >= count {
            break;
        }
    }
    if roots.len() < count {
        return Err(Error::BudgetExceeded { found: roots.len(), requested: count, z_max: z_hi });
    }
    roots.truncate(count);
    let entries = roots
        .par_iter()
        .enumerate()
        .map(|(i, &z)| BranchEntry::new(i + 1, params, z))
        .collect::<Result<Vec<_>>>()?;
    Ok((entries, [z_lo, z_hi]))
}

pub fn find_equilibria(params: &ModelParams, count: usize) -> Result<Vec<BranchEntry>> {
    Ok(find_equilibria_with_window(params, count)?.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_residual_on_unit_circle() {
        let sol = integrate_profile(&ModelParams::new(0.0), 1.0).unwrap();
        assert!((mean_of(&sol) + 1.0).abs() < 1e-8);
        assert_eq!(residual_mean(&ModelParams::new(0.0), 1.0), Err(Error::C0Zero));
    }

    #[test]
    fn phi2_vanishes_on_circles() {
        for z0 in [0.5, 2.0] {
            assert!(residual_phi2(&ModelParams::new(0.0), z0).unwrap().abs() < 1e-7);
        }
    }

    #[test]
    fn scan_contract() {
        let p = ModelParams::new(1.0);
        assert_eq!(
            scan_brackets(&p, 1.0, 1.0, 10),
            Err(Error::EmptyRange { z_min: 1.0, z_max: 1.0 })
        );
        assert!(scan_brackets(&ModelParams::new(0.0), 1.0, 2.0, 10).unwrap().degenerate);
    }

    #[test]
    fn grid_endpoints_exact() {
        let g = geometric_grid(0.3, 7.0, 11);
        assert_eq!(g[0], 0.3);
        assert_eq!(g[10], 7.0);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
    }
}

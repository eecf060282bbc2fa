//! Generating curves of the reduced membrane equation.
//!
//! The profile is integrated in three pieces: a pole series on [0, σ0], an
//! arc-length phase down to a switch height z_s, and a final descent with z
//! as independent variable. The descent uses v = cos φ / z and p = dv/dz,
//! which stay regular at z = 0.

use serde::{Deserialize, Serialize};

use crate::curve::{CurvePoint, GeneratingCurve};
use crate::integrator::{self, locate_root, DenseSegment, Direction, Event, Settings, Stop};
use crate::quadrature::{richardson, GaussLegendre};
use crate::{Error, Result};

/// Largest |cos φ| accepted on the descent handled in the z variable.
const DESCENT_COS_LIMIT: f64 = 0.87;

/// Spontaneous curvature and numerical controls.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub c0: f64,
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Pole start offset. `None` selects 1e-4·max(|z0|, 1).
    pub sigma0: Option<f64>,
    /// Stop height of the arc-length phase, as a fraction of z0.
    pub z_cutoff_factor: f64,
    pub sigma_max: f64,
    /// Largest switch height to the z variable, as a fraction of z0.
    pub switch_fraction: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            c0: 0.0,
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            sigma0: None,
            z_cutoff_factor: 1e-6,
            sigma_max: 1e3,
            switch_fraction: 0.05,
        }
    }
}

impl ModelParams {
    pub fn new(c0: f64) -> Self {
        Self { c0, ..Self::default() }
    }

    pub fn with_tolerances(mut self, abs_tol: f64, rel_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_sigma0(mut self, sigma0: f64) -> Self {
        self.sigma0 = Some(sigma0);
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidParameter(what.to_string()));
        if !self.c0.is_finite() || self.c0 < 0.0 {
            return bad("c0 must be finite and non-negative");
        }
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return bad("tolerances must be positive");
        }
        if let Some(s) = self.sigma0 {
            if !(s > 0.0 && s.is_finite()) {
                return bad("sigma0 must be positive");
            }
        }
        if !(self.z_cutoff_factor > 0.0 && self.z_cutoff_factor <= 1e-4) {
            return bad("z_cutoff_factor must lie in (0, 1e-4]");
        }
        if !(self.sigma_max > 0.0) {
            return bad("sigma_max must be positive");
        }
        if !(self.switch_fraction > 0.0 && self.switch_fraction <= 0.5) {
            return bad("switch_fraction must lie in (0, 0.5]");
        }
        Ok(())
    }

    pub fn sigma0_for(&self, z0: f64) -> f64 {
        self.sigma0.unwrap_or(1e-4 * z0.abs().max(1.0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileState {
    pub sigma: f64,
    pub r: f64,
    pub z: f64,
    pub phi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Termination {
    HitBoundary,
    SigmaMaxExceeded,
    AxisReturn,
    StepFailure,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Curvatures {
    #[serde(rename = "H")]
    pub h: f64,
    #[serde(rename = "K")]
    pub k: f64,
    pub nu3: f64,
    pub kappa_meridian: f64,
    pub kappa_parallel: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundaryTrace {
    pub sigma_b: f64,
    pub r_b: f64,
    pub phi_b: f64,
    pub dphi_b: f64,
    pub d2phi_b: f64,
    #[serde(rename = "dH_dn")]
    pub dh_dn: f64,
}

/// Agreement between the extrapolated arc-length phase and the z descent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundaryDiagnostics {
    pub switch_height: f64,
    pub switch_sigma: f64,
    pub sigma_end: f64,
    pub r_end: f64,
    pub extrapolation_gap: f64,
}

/// φ′(0) = −(1/z0 + c0).
pub fn pole_slope(c0: f64, z0: f64) -> f64 {
    -(1.0 / z0 + c0)
}

fn pole_series(c0: f64, z0: f64, sigma: f64) -> (ProfileState, f64) {
    let k = pole_slope(c0, z0);
    let m = -k * c0 / (4.0 * z0);
    let s2 = sigma * sigma;
    let state = ProfileState {
        sigma,
        r: sigma - k * k * s2 * sigma / 6.0,
        z: z0 + 0.5 * k * s2,
        phi: k * sigma + m * s2 * sigma,
    };
    (state, k + 3.0 * m * s2)
}

/// State at σ = sigma0 from the series expansion at the pole.
pub fn initial_state_series(params: &ModelParams, z0: f64) -> Result<ProfileState> {
    if z0 == 0.0 {
        return Err(Error::DegenerateInitialHeight);
    }
    Ok(pole_series(params.c0, z0, params.sigma0_for(z0)).0)
}

/// Right-hand side (r′, z′, φ′) of the profile system.
pub fn rhs(state: &ProfileState, c0: f64) -> Result<[f64; 3]> {
    if !(state.r > 0.0 && state.z > 0.0) {
        return Err(Error::SingularEvaluation { r: state.r, z: state.z });
    }
    Ok(raw_rhs(state.r, state.z, state.phi, c0))
}

fn raw_rhs(r: f64, z: f64, phi: f64, c0: f64) -> [f64; 3] {
    let (s, c) = phi.sin_cos();
    [c, s, -2.0 * c / z - s / r - 2.0 * c0]
}

/// Curvatures at a profile state; the pole (r = 0) and boundary (z = 0)
/// use their limit values.
pub fn curvatures_at(state: &ProfileState, c0: f64) -> Result<Curvatures> {
    let nu3 = state.phi.cos();
    let (km, kp) = if state.r == 0.0 {
        if state.sigma != 0.0 || state.z <= 0.0 {
            return Err(Error::SingularEvaluation { r: state.r, z: state.z });
        }
        let k = pole_slope(c0, state.z);
        (k, k)
    } else if state.z == 0.0 {
        if state.r < 0.0 {
            return Err(Error::SingularEvaluation { r: state.r, z: state.z });
        }
        (2.0 * c0 - 1.0 / state.r, -1.0 / state.r)
    } else {
        let d = rhs(state, c0)?;
        (d[2], state.phi.sin() / state.r)
    };
    Ok(Curvatures {
        h: 0.5 * (km + kp),
        k: km * kp,
        nu3,
        kappa_meridian: km,
        kappa_parallel: kp,
    })
}

/// Integrated generating curve with its boundary trace.
#[derive(Debug, Clone)]
pub struct ProfileSolution {
    pub params: ModelParams,
    /// Initial height after normalization (always positive).
    pub z0: f64,
    /// Spontaneous curvature of the normalized problem.
    pub c0: f64,
    /// True if the input height was negative and the curve was reflected.
    pub normalized: bool,
    pub samples: Vec<ProfileState>,
    pub sigma_b: f64,
    pub r_b: f64,
    pub phi_b: f64,
    pub dphi_b: f64,
    pub d2phi_b: f64,
    pub termination: Termination,
    pub diagnostics: Option<BoundaryDiagnostics>,
    failure: Option<Error>,
    sigma0: f64,
    sigma_phase: Vec<DenseSegment<3>>,
    descent: Vec<DenseSegment<4>>,
    sigma_s: f64,
    z_s: f64,
}

struct Descent {
    segments: Vec<DenseSegment<4>>,
    sigma_phase_end: usize,
    sigma_s: f64,
    z_s: f64,
    extrapolated: [f64; 3],
    end: [f64; 4],
}

fn descent_rhs() -> impl Fn(f64, &[f64; 4]) -> Option<[f64; 4]> {
    |z, y| {
        let (r, v, p) = (y[1], y[2], y[3]);
        let w = z * v;
        if !(r > 0.0) || !(w.abs() < 1.0) {
            return None;
        }
        let s = (1.0 - w * w).sqrt();
        Some([-1.0 / s, -w / s, p, v * ((v + z * p) / (s * r) - 1.0 / (r * r))])
    }
}

fn level_crossing(segs: &[DenseSegment<3>], level: f64) -> Option<(usize, f64)> {
    let idx = segs.iter().rposition(|seg| {
        let a = seg.start_state()[1];
        let b = seg.eval(seg.t_end)[1];
        a >= level && b <= level
    })?;
    let seg = &segs[idx];
    let t = locate_root(|t| seg.eval(t)[1] - level, seg.t_start, seg.t_end);
    Some((idx, t))
}

/// (σ, r, φ) of the arc-length phase at heights 4, 2 and 1 times `z_cut`,
/// integrated from the switch height in halving stages with steps below a
/// quarter of the stage height.
fn cutoff_levels(
    params: &ModelParams,
    c0: f64,
    sigma_s: f64,
    state_s: [f64; 3],
    z_s: f64,
    z_cut: f64,
) -> std::result::Result<[[f64; 3]; 3], String> {
    let mut k = (z_s / z_cut).log2().floor() as i32;
    let (mut t, mut y) = (sigma_s, state_s);
    let mut out = [[0.0; 3]; 3];
    while k >= 0 {
        let level = z_cut * 2f64.powi(k);
        if y[1] > level {
            let settings = Settings::new(params.abs_tol, params.rel_tol).with_max_step(0.25 * level);
            let events = [Event::new(Direction::Falling, move |_, y: &[f64; 3]| y[1] - level)];
            let traj = integrator::integrate(
                |_, y: &[f64; 3]| (y[0] > 0.0 && y[1] > 0.0).then(|| raw_rhs(y[0], y[1], y[2], c0)),
                t,
                y,
                params.sigma_max,
                &settings,
                &events,
            )
            .map_err(|e| e.to_string())?;
            if traj.stop != Stop::Event(0) {
                return Err(format!("cutoff level {level} not reached"));
            }
            (t, y) = (traj.t, traj.y);
            y[1] = level;
        }
        if k <= 2 {
            out[2 - k as usize] = [t, y[0], y[2]];
        }
        k -= 1;
    }
    Ok(out)
}

fn finish_descent(
    params: &ModelParams,
    c0: f64,
    z0: f64,
    segs: &[DenseSegment<3>],
    end: (f64, [f64; 3]),
) -> std::result::Result<Descent, String> {
    let z_cut = params.z_cutoff_factor * z0;
    let regular = |y: &[f64; 3]| y[2].cos().abs() <= DESCENT_COS_LIMIT && y[2].sin() < 0.0;
    let mut good_from = segs.first().map_or(end.0, |s| s.t_start);
    for seg in segs.iter().rev() {
        let ok = (0..=4).all(|i| {
            let t = seg.t_start + (seg.t_end - seg.t_start) * i as f64 / 4.0;
            regular(&seg.eval(t))
        });
        if !ok {
            good_from = seg.t_end;
            break;
        }
    }
    let first_good = segs.iter().position(|s| s.t_start >= good_from).unwrap_or(segs.len());
    let tail = &segs[first_good..];
    let z_ok = tail.first().map_or(end.1[1], |s| s.start_state()[1]);
    let mut z_s = params.switch_fraction * z0;
    while z_s >= z_ok {
        z_s *= 0.5;
    }
    if z_s < 100.0 * z_cut {
        return Err(format!("no regular final descent above z = {}", 100.0 * z_cut));
    }
    let (idx, sigma_s) = level_crossing(tail, z_s).ok_or("switch height not crossed")?;
    let state_s = tail[idx].eval(sigma_s);

    let extrap = cutoff_levels(params, c0, sigma_s, state_s, z_s, z_cut)?;
    let mut extrapolated = [0.0; 3];
    for (k, out) in extrapolated.iter_mut().enumerate() {
        let vals = [extrap[0][k], extrap[1][k], extrap[2][k]];
        *out = richardson(&vals, 1, 1).0;
    }

    let (r, phi) = (state_s[0], state_s[2]);
    let v = phi.cos() / z_s;
    let g = 2.0 * c0 + phi.sin() / r;
    let p = (v + g) / z_s;
    let settings = Settings::new(params.abs_tol, params.rel_tol).with_first_step(z_s / 16.0);
    let traj = integrator::integrate(
        descent_rhs(),
        z_s,
        [sigma_s, r, v, p],
        0.0,
        &settings,
        &[],
    )
    .map_err(|e| e.to_string())?;
    Ok(Descent {
        segments: traj.segments,
        sigma_phase_end: first_good + idx,
        sigma_s,
        z_s,
        extrapolated,
        end: traj.y,
    })
}

/// Integrate the profile and return it whatever the termination.
pub fn trace_profile(params: &ModelParams, z0: f64) -> Result<ProfileSolution> {
    params.validate()?;
    if z0 == 0.0 {
        return Err(Error::DegenerateInitialHeight);
    }
    if !z0.is_finite() {
        return Err(Error::InvalidParameter(format!("z0 = {z0}")));
    }
    let (c0, z, normalized) = if z0 < 0.0 {
        if params.c0 > 0.0 && z0 > -1.0 / params.c0 {
            return Err(Error::ForbiddenInitialHeight { z0 });
        }
        (-params.c0, -z0, true)
    } else {
        (params.c0, z0, false)
    };
    let sigma0 = params.sigma0_for(z);
    let (start, _) = pole_series(c0, z, sigma0);
    let z_cut = params.z_cutoff_factor * z;

    let mut sol = ProfileSolution {
        params: *params,
        z0: z,
        c0,
        normalized,
        samples: Vec::new(),
        sigma_b: f64::NAN,
        r_b: f64::NAN,
        phi_b: f64::NAN,
        dphi_b: f64::NAN,
        d2phi_b: f64::NAN,
        termination: Termination::StepFailure,
        diagnostics: None,
        failure: None,
        sigma0,
        sigma_phase: Vec::new(),
        descent: Vec::new(),
        sigma_s: sigma0,
        z_s: f64::NAN,
    };

    let events = [
        Event::new(Direction::Falling, move |_, y: &[f64; 3]| y[1] - z_cut),
        Event::new(Direction::Falling, move |_, y: &[f64; 3]| y[0] - 0.5 * sigma0),
    ];
    let settings = Settings::new(params.abs_tol, params.rel_tol);
    let traj = integrator::integrate(
        |_, y: &[f64; 3]| (y[0] > 0.0 && y[1] > 0.0).then(|| raw_rhs(y[0], y[1], y[2], c0)),
        sigma0,
        [start.r, start.z, start.phi],
        params.sigma_max,
        &settings,
        &events,
    );
    let traj = match traj {
        Ok(t) => t,
        Err(e) => {
            let t = match e {
                integrator::IntegrationError::StepSizeCollapse { t }
                | integrator::IntegrationError::TooManySteps { t }
                | integrator::IntegrationError::RhsFailure { t } => t,
            };
            sol.failure = Some(Error::StepFailure { t, reason: e.to_string() });
            sol.build_samples();
            return Ok(sol);
        }
    };
    match traj.stop {
        Stop::Bound => {
            sol.termination = Termination::SigmaMaxExceeded;
            sol.failure = Some(Error::SigmaMaxExceeded { sigma_max: params.sigma_max });
        }
        Stop::Event(1) => {
            sol.termination = Termination::AxisReturn;
            sol.failure = Some(Error::AxisReturn { sigma: traj.t, z: traj.y[1] });
        }
        Stop::Event(_) => {
            match finish_descent(params, c0, z, &traj.segments, (traj.t, traj.y)) {
                Ok(d) => {
                    let mut phase = traj.segments[..=d.sigma_phase_end].to_vec();
                    if let Some(last) = phase.last_mut() {
                        last.t_end = d.sigma_s;
                    }
                    let [sigma_end, r_end, v_b, p_b] = d.end;
                    let [sigma_b, r_b, phi_b] = d.extrapolated;
                    sol.sigma_phase = phase;
                    sol.descent = d.segments;
                    sol.sigma_s = d.sigma_s;
                    sol.z_s = d.z_s;
                    sol.sigma_b = sigma_b;
                    sol.r_b = r_b;
                    sol.phi_b = phi_b;
                    sol.dphi_b = -v_b;
                    sol.d2phi_b = 2.0 * p_b;
                    sol.termination = Termination::HitBoundary;
                    sol.diagnostics = Some(BoundaryDiagnostics {
                        switch_height: d.z_s,
                        switch_sigma: d.sigma_s,
                        sigma_end,
                        r_end,
                        extrapolation_gap: (sigma_b - sigma_end).abs().max((r_b - r_end).abs()),
                    });
                    sol.build_samples();
                    return Ok(sol);
                }
                Err(reason) => {
                    sol.failure = Some(Error::StepFailure { t: traj.t, reason });
                }
            }
        }
    }
    sol.sigma_phase = traj.segments;
    sol.sigma_s = traj.t;
    sol.build_samples();
    Ok(sol)
}

/// Integrate the profile from the pole to the plane z = 0.
pub fn integrate_profile(params: &ModelParams, z0: f64) -> Result<ProfileSolution> {
    let sol = trace_profile(params, z0)?;
    match sol.failure.clone() {
        Some(e) => Err(e),
        None => Ok(sol),
    }
}

/// Boundary values of a profile that reached z = 0.
pub fn boundary_trace(sol: &ProfileSolution) -> Result<BoundaryTrace> {
    if sol.termination != Termination::HitBoundary {
        return Err(Error::NoBoundaryData);
    }
    Ok(BoundaryTrace {
        sigma_b: sol.sigma_b,
        r_b: sol.r_b,
        phi_b: sol.phi_b,
        dphi_b: sol.dphi_b,
        d2phi_b: sol.d2phi_b,
        dh_dn: 0.5 * sol.d2phi_b,
    })
}

impl ProfileSolution {
    pub fn is_boundary(&self) -> bool {
        self.termination == Termination::HitBoundary
    }

    pub fn failure(&self) -> Option<&Error> {
        self.failure.as_ref()
    }

    /// Initial height as passed in, before normalization.
    pub fn input_z0(&self) -> f64 {
        if self.normalized {
            -self.z0
        } else {
            self.z0
        }
    }

    pub fn sigma0(&self) -> f64 {
        self.sigma0
    }

    /// Arc length at which the curve data ends.
    pub fn sigma_end(&self) -> f64 {
        match (&self.diagnostics, self.descent.last()) {
            (Some(_), Some(seg)) => seg.eval(seg.t_end)[0],
            _ => self.sigma_s,
        }
    }

    pub fn state_at(&self, sigma: f64) -> ProfileState {
        let p = self.point(sigma);
        ProfileState { sigma: p.sigma, r: p.r, z: p.z, phi: p.phi }
    }

    pub fn curvatures(&self, sigma: f64) -> Curvatures {
        let p = self.point(sigma);
        Curvatures {
            h: p.mean_curvature(),
            k: p.gauss_curvature(),
            nu3: p.cos_phi,
            kappa_meridian: p.dphi,
            kappa_parallel: p.kappa_par,
        }
    }

    fn series_point(&self, sigma: f64) -> CurvePoint {
        let (st, dphi) = pole_series(self.c0, self.z0, sigma);
        let (s, c) = st.phi.sin_cos();
        let kappa_par = if sigma == 0.0 { dphi } else { s / st.r };
        CurvePoint {
            sigma,
            r: st.r,
            z: st.z,
            phi: st.phi,
            cos_phi: c,
            sin_phi: s,
            dphi,
            kappa_par,
            nu3_over_z: c / st.z,
        }
    }

    fn sigma_phase_point(&self, sigma: f64, y: [f64; 3]) -> CurvePoint {
        let [r, z, phi] = y;
        let (s, c) = phi.sin_cos();
        CurvePoint {
            sigma,
            r,
            z,
            phi,
            cos_phi: c,
            sin_phi: s,
            dphi: raw_rhs(r, z, phi, self.c0)[2],
            kappa_par: s / r,
            nu3_over_z: c / z,
        }
    }

    fn descent_point(z: f64, y: [f64; 4]) -> CurvePoint {
        let [sigma, r, v, p] = y;
        let w = (z * v).clamp(-1.0, 1.0);
        let s = (1.0 - w * w).sqrt();
        CurvePoint {
            sigma,
            r,
            z,
            phi: -w.acos(),
            cos_phi: w,
            sin_phi: -s,
            dphi: -v - z * p,
            kappa_par: -s / r,
            nu3_over_z: v,
        }
    }

    fn descent_point_at_sigma(&self, sigma: f64) -> CurvePoint {
        let idx = self
            .descent
            .partition_point(|seg| seg.start_state()[0] <= sigma)
            .max(1)
            - 1;
        let seg = &self.descent[idx];
        // σ decreases with z on the descent
        let (mut lo, mut hi) = (seg.t_end, seg.t_start);
        let sig = |z: f64| seg.eval(z)[0] - sigma;
        let (f_lo, f_hi) = (sig(lo), sig(hi));
        if f_lo <= 0.0 {
            return Self::descent_point(lo, seg.eval(lo));
        }
        if f_hi >= 0.0 {
            return Self::descent_point(hi, seg.eval(hi));
        }
        let mut z = lo + (hi - lo) * f_lo / (f_lo - f_hi);
        for _ in 0..60 {
            let f = sig(z);
            if f == 0.0 {
                break;
            }
            if f > 0.0 {
                lo = z;
            } else {
                hi = z;
            }
            let step = f / seg.derivative(z)[0];
            let mut next = z - step;
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if (next - z).abs() <= 1e-16 * (1.0 + z.abs()) {
                z = next;
                break;
            }
            z = next;
        }
        Self::descent_point(z, seg.eval(z))
    }

    /// Curve data at the sample positions: pole, series start, and eight
    /// points per accepted step.
    pub fn sample_points(&self) -> Vec<CurvePoint> {
        const PER_STEP: usize = 8;
        let mut out = vec![self.series_point(0.0), self.series_point(self.sigma0)];
        for seg in &self.sigma_phase {
            for i in 1..=PER_STEP {
                let t = seg.t_start + (seg.t_end - seg.t_start) * i as f64 / PER_STEP as f64;
                out.push(self.sigma_phase_point(t, seg.eval(t)));
            }
        }
        for seg in &self.descent {
            for i in 1..=PER_STEP {
                let z = seg.t_start + (seg.t_end - seg.t_start) * i as f64 / PER_STEP as f64;
                out.push(Self::descent_point(z, seg.eval(z)));
            }
        }
        out
    }

    fn build_samples(&mut self) {
        self.samples = self
            .sample_points()
            .into_iter()
            .map(|p| ProfileState { sigma: p.sigma, r: p.r, z: p.z, phi: p.phi })
            .collect();
    }
}

impl GeneratingCurve for ProfileSolution {
    fn c0(&self) -> f64 {
        self.c0
    }

    fn sigma_b(&self) -> f64 {
        self.sigma_end()
    }

    fn point(&self, sigma: f64) -> CurvePoint {
        let sigma = sigma.max(0.0);
        if sigma <= self.sigma0 {
            return self.series_point(sigma);
        }
        if sigma <= self.sigma_s || self.descent.is_empty() {
            let seg = integrator::segment_at(&self.sigma_phase, sigma.min(self.sigma_s))
                .or(self.sigma_phase.last());
            return match seg {
                Some(seg) => self.sigma_phase_point(sigma, seg.eval(sigma.min(seg.t_end))),
                None => self.series_point(self.sigma0),
            };
        }
        self.descent_point_at_sigma(sigma)
    }

    fn integrate(&self, f: &dyn Fn(&CurvePoint) -> f64) -> f64 {
        let gl = GaussLegendre::new(8);
        let head = self.integrate_head(f);
        let tail: f64 = self
            .descent
            .iter()
            .map(|seg| {
                gl.integrate(seg.t_end, seg.t_start, |z| {
                    let p = Self::descent_point(z, seg.eval(z));
                    f(&p) / p.sin_phi.abs()
                })
            })
            .sum();
        head + tail
    }

    fn descent_height(&self) -> f64 {
        self.z_s
    }

    fn point_at_height(&self, z: f64) -> CurvePoint {
        let seg = integrator::segment_at(&self.descent, z)
            .or(self.descent.last())
            .expect("profile without descent data");
        Self::descent_point(z, seg.eval(z))
    }

    fn integrate_head(&self, f: &dyn Fn(&CurvePoint) -> f64) -> f64 {
        let gl = GaussLegendre::new(8);
        let cap = gl.integrate(0.0, self.sigma0, |s| f(&self.series_point(s)));
        let body: f64 = self
            .sigma_phase
            .iter()
            .map(|seg| gl.integrate(seg.t_start, seg.t_end, |s| f(&self.sigma_phase_point(s, seg.eval(s)))))
            .sum();
        cap + body
    }

    fn sigma_head(&self) -> f64 {
        self.sigma_s
    }

    fn boundary_angle(&self) -> f64 {
        self.phi_b
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    #[test]
    fn pole_slope_values() {
        assert_eq!(pole_slope(0.0, 1.0), -1.0);
        assert_eq!(pole_slope(1.0, 1.0), -2.0);
        assert_eq!(pole_slope(1.0, 2.0), -1.5);
    }

    #[test]
    fn rhs_values() {
        let h = 2f64.sqrt() / 2.0;
        let st = ProfileState { sigma: FRAC_PI_4, r: h, z: h, phi: -FRAC_PI_4 };
        assert!((rhs(&st, 0.0).unwrap()[2] + 1.0).abs() < 1e-14);
        assert!((rhs(&st, 1.0).unwrap()[2] + 3.0).abs() < 1e-14);
        let pole = ProfileState { sigma: 0.0, r: 0.0, z: 1.0, phi: 0.0 };
        assert!(matches!(rhs(&pole, 1.0), Err(Error::SingularEvaluation { .. })));
    }

    #[test]
    fn series_rejects_zero_height() {
        assert_eq!(
            initial_state_series(&ModelParams::new(1.0), 0.0),
            Err(Error::DegenerateInitialHeight)
        );
    }

    #[test]
    fn circle_solution_is_reproduced() {
        let sol = integrate_profile(&ModelParams::new(0.0), 1.0).unwrap();
        assert_eq!(sol.termination, Termination::HitBoundary);
        assert!((sol.sigma_b - FRAC_PI_2).abs() < 1e-8);
        assert!((sol.r_b - 1.0).abs() < 1e-8);
        assert!((sol.dphi_b + 1.0).abs() < 1e-8);
        assert!(sol.d2phi_b.abs() < 1e-8);
        for i in 0..=200 {
            let s = sol.sigma_b() * i as f64 / 200.0;
            let p = sol.point(s);
            assert!((p.r - s.sin()).abs() + (p.z - s.cos()).abs() < 1e-8, "sigma {s}");
        }
        let mean = sol.integrate(&|p| (p.mean_curvature() + 0.0) * p.r);
        assert!((mean + 1.0).abs() < 1e-8);
        let area = sol.integrate(&|p| p.r);
        assert!((area - 1.0).abs() < 1e-9);
        let _ = PI;
    }

    #[test]
    fn boundary_limit_holds_for_c0_one() {
        let sol = integrate_profile(&ModelParams::new(1.0), 1.0).unwrap();
        assert!((sol.phi_b + FRAC_PI_2).abs() < 1e-6);
        assert!((sol.dphi_b - (2.0 - 1.0 / sol.r_b)).abs() < 1e-6);
        let d = sol.diagnostics.unwrap();
        assert!(d.extrapolation_gap < 1e-8, "{d:?}");
    }

    #[test]
    fn forbidden_band_rejected() {
        assert_eq!(
            trace_profile(&ModelParams::new(1.0), -0.5).unwrap_err(),
            Error::ForbiddenInitialHeight { z0: -0.5 }
        );
    }

    #[test]
    fn curvature_limits() {
        let pole = ProfileState { sigma: 0.0, r: 0.0, z: 1.0, phi: 0.0 };
        let c = curvatures_at(&pole, 1.0).unwrap();
        assert_eq!(c.kappa_meridian, c.kappa_parallel);
        let b = ProfileState { sigma: 2.0, r: 0.5, z: 0.0, phi: -FRAC_PI_2 };
        assert_eq!(curvatures_at(&b, 1.0).unwrap().kappa_parallel, -2.0);
    }
}

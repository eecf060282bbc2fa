//! Generating curves of axisymmetric surfaces and quadrature over them.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use crate::quadrature::GaussLegendre;

/// Geometric data of a generating curve at one arc-length value.
///
/// `dphi` is the meridian curvature φ′ and `kappa_par = sin φ / r` the
/// parallel curvature, with their limits stored at the pole and boundary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub sigma: f64,
    pub r: f64,
    pub z: f64,
    pub phi: f64,
    pub cos_phi: f64,
    pub sin_phi: f64,
    pub dphi: f64,
    pub kappa_par: f64,
    pub nu3_over_z: f64,
}

impl CurvePoint {
    pub fn mean_curvature(&self) -> f64 {
        0.5 * (self.dphi + self.kappa_par)
    }

    pub fn gauss_curvature(&self) -> f64 {
        self.dphi * self.kappa_par
    }

    pub fn nu3(&self) -> f64 {
        self.cos_phi
    }
}

/// A meridian curve from the pole (σ = 0) to the plane z = 0 (σ = σ_b).
pub trait GeneratingCurve: Sync {
    fn c0(&self) -> f64;

    fn sigma_b(&self) -> f64;

    fn point(&self, sigma: f64) -> CurvePoint;

    /// ∫₀^{σ_b} f dσ.
    fn integrate(&self, f: &dyn Fn(&CurvePoint) -> f64) -> f64;

    /// Height below which the curve descends monotonically with |cos φ|
    /// bounded away from one.
    fn descent_height(&self) -> f64;

    /// Point of the final descent at height `z` (0 ≤ z ≤ descent height).
    fn point_at_height(&self, z: f64) -> CurvePoint;

    /// ∫ f dσ over the part of the curve above the descent height.
    fn integrate_head(&self, f: &dyn Fn(&CurvePoint) -> f64) -> f64;

    /// Arc length of the point at the descent height.
    fn sigma_head(&self) -> f64 {
        self.point_at_height(self.descent_height()).sigma
    }

    /// ∫ f dσ over {z ≥ ẑ}, for 0 < ẑ ≤ descent height.
    fn integrate_above(&self, z_hat: f64, f: &dyn Fn(&CurvePoint) -> f64) -> f64 {
        self.integrate_head(f) + graded_height_integral(self, z_hat, self.descent_height(), f)
    }

    /// Boundary angle used for the admissibility check.
    fn boundary_angle(&self) -> f64 {
        self.point(self.sigma_b()).phi
    }
}

/// ∫ f dσ over the descent between heights `z_lo` and `z_hi`, on panels
/// graded geometrically towards `z_lo`.
pub fn graded_height_integral<C: GeneratingCurve + ?Sized>(
    curve: &C,
    z_lo: f64,
    z_hi: f64,
    f: &dyn Fn(&CurvePoint) -> f64,
) -> f64 {
    if z_hi <= z_lo {
        return 0.0;
    }
    let gl = GaussLegendre::new(12);
    let mut breaks = vec![z_lo];
    let mut z = z_lo;
    while 2.0 * z < z_hi {
        z *= 2.0;
        breaks.push(z);
    }
    breaks.push(z_hi);
    gl.composite(&breaks, |z| {
        let p = curve.point_at_height(z);
        f(&p) / p.sin_phi.abs()
    })
}

/// Closed-form hemisphere of radius `radius` centred on the plane z = 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hemisphere {
    pub radius: f64,
    pub c0: f64,
}

impl Hemisphere {
    pub fn new(radius: f64, c0: f64) -> crate::Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(crate::Error::NonPositiveRadius(radius));
        }
        Ok(Self { radius, c0 })
    }

    fn sigma_integral(&self, a: f64, b: f64, f: &dyn Fn(&CurvePoint) -> f64) -> f64 {
        let gl = GaussLegendre::new(12);
        let n = 8;
        let breaks: Vec<f64> = (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect();
        gl.composite(&breaks, |s| f(&self.point(s)))
    }
}

impl GeneratingCurve for Hemisphere {
    fn c0(&self) -> f64 {
        self.c0
    }

    fn sigma_b(&self) -> f64 {
        FRAC_PI_2 * self.radius
    }

    fn point(&self, sigma: f64) -> CurvePoint {
        let rr = self.radius;
        let t = sigma / rr;
        CurvePoint {
            sigma,
            r: rr * t.sin(),
            z: rr * t.cos(),
            phi: -t,
            cos_phi: t.cos(),
            sin_phi: -t.sin(),
            dphi: -1.0 / rr,
            kappa_par: -1.0 / rr,
            nu3_over_z: 1.0 / rr,
        }
    }

    fn integrate(&self, f: &dyn Fn(&CurvePoint) -> f64) -> f64 {
        self.sigma_integral(0.0, self.sigma_b(), f)
    }

    fn descent_height(&self) -> f64 {
        self.radius * FRAC_PI_4.cos()
    }

    fn point_at_height(&self, z: f64) -> CurvePoint {
        let t = (z / self.radius).clamp(-1.0, 1.0).acos();
        self.point(t * self.radius)
    }

    fn integrate_head(&self, f: &dyn Fn(&CurvePoint) -> f64) -> f64 {
        self.sigma_integral(0.0, FRAC_PI_4 * self.radius, f)
    }

    fn boundary_angle(&self) -> f64 {
        -FRAC_PI_2
    }
}

/// One row of a tabulated profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleRow {
    pub sigma: f64,
    pub r: f64,
    pub z: f64,
    pub phi: f64,
    pub h: f64,
}

/// Generating curve interpolated from tabulated samples by cubic Hermite
/// polynomials, using r′ = cos φ, z′ = sin φ and φ′ = 2H − sin φ / r.
#[derive(Debug, Clone)]
pub struct SampledCurve {
    rows: Vec<SampleRow>,
    dphi: Vec<f64>,
    c0: f64,
    head: usize,
}

fn hermite(t: f64, h: f64, y0: f64, y1: f64, d0: f64, d1: f64) -> (f64, f64) {
    let t2 = t * t;
    let t3 = t2 * t;
    let v = (2.0 * t3 - 3.0 * t2 + 1.0) * y0
        + (t3 - 2.0 * t2 + t) * h * d0
        + (-2.0 * t3 + 3.0 * t2) * y1
        + (t3 - t2) * h * d1;
    let dv = ((6.0 * t2 - 6.0 * t) * y0 + (-6.0 * t2 + 6.0 * t) * y1) / h
        + (3.0 * t2 - 4.0 * t + 1.0) * d0
        + (3.0 * t2 - 2.0 * t) * d1;
    (v, dv)
}

impl SampledCurve {
    pub fn new(rows: Vec<SampleRow>, c0: f64) -> crate::Result<Self> {
        if rows.len() < 4 {
            return Err(crate::Error::Parse("profile needs at least four rows".into()));
        }
        if rows.windows(2).any(|w| !(w[1].sigma > w[0].sigma)) {
            return Err(crate::Error::Parse("sigma must increase strictly".into()));
        }
        let dphi: Vec<f64> = rows
            .iter()
            .map(|row| if row.r == 0.0 { row.h } else { 2.0 * row.h - row.phi.sin() / row.r })
            .collect();
        let regular = |row: &SampleRow| row.phi.cos().abs() <= 0.87 && row.phi.sin() < 0.0;
        let mut head = rows.len() - 1;
        while head > 0 && regular(&rows[head - 1]) {
            head -= 1;
        }
        if head + 1 >= rows.len() {
            head = rows.len() - 2;
        }
        Ok(Self { rows, dphi, c0, head })
    }

    pub fn rows(&self) -> &[SampleRow] {
        &self.rows
    }

    /// Median of −(H + cos φ / z) over rows above the plane; equals c0 on
    /// solutions of the reduced membrane equation.
    pub fn implied_c0(&self) -> Option<f64> {
        let mut v: Vec<f64> = self
            .rows
            .iter()
            .filter(|row| row.z > 0.0)
            .map(|row| -(row.h + row.phi.cos() / row.z))
            .filter(|x| x.is_finite())
            .collect();
        if v.is_empty() {
            return None;
        }
        v.sort_by(f64::total_cmp);
        Some(v[v.len() / 2] + 0.0)
    }

    fn interval(&self, sigma: f64) -> usize {
        self.rows.partition_point(|r| r.sigma <= sigma).clamp(1, self.rows.len() - 1) - 1
    }

    fn descent_sigma(&self, z: f64) -> f64 {
        let (mut lo, mut hi) = (self.rows[self.head].sigma, self.sigma_b());
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if self.point(mid).z > z {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

impl GeneratingCurve for SampledCurve {
    fn c0(&self) -> f64 {
        self.c0
    }

    fn sigma_b(&self) -> f64 {
        self.rows[self.rows.len() - 1].sigma
    }

    fn point(&self, sigma: f64) -> CurvePoint {
        let i = self.interval(sigma);
        let (a, b) = (&self.rows[i], &self.rows[i + 1]);
        let h = b.sigma - a.sigma;
        let t = ((sigma - a.sigma) / h).clamp(0.0, 1.0);
        let (r, _) = hermite(t, h, a.r, b.r, a.phi.cos(), b.phi.cos());
        let (z, _) = hermite(t, h, a.z, b.z, a.phi.sin(), b.phi.sin());
        let (phi, dphi) = hermite(t, h, a.phi, b.phi, self.dphi[i], self.dphi[i + 1]);
        let (s, c) = phi.sin_cos();
        let kappa_par = if r > 0.0 { s / r } else { dphi };
        let nu3_over_z = if z > 0.0 { c / z } else { -dphi };
        CurvePoint { sigma, r, z, phi, cos_phi: c, sin_phi: s, dphi, kappa_par, nu3_over_z }
    }

    fn integrate(&self, f: &dyn Fn(&CurvePoint) -> f64) -> f64 {
        let breaks: Vec<f64> = self.rows.iter().map(|r| r.sigma).collect();
        GaussLegendre::new(6).composite(&breaks, |s| f(&self.point(s)))
    }

    fn descent_height(&self) -> f64 {
        self.rows[self.head].z
    }

    fn point_at_height(&self, z: f64) -> CurvePoint {
        self.point(self.descent_sigma(z))
    }

    fn integrate_head(&self, f: &dyn Fn(&CurvePoint) -> f64) -> f64 {
        let breaks: Vec<f64> = self.rows[..=self.head].iter().map(|r| r.sigma).collect();
        GaussLegendre::new(6).composite(&breaks, |s| f(&self.point(s)))
    }

    fn sigma_head(&self) -> f64 {
        self.rows[self.head].sigma
    }

    fn boundary_angle(&self) -> f64 {
        self.rows[self.rows.len() - 1].phi
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn hemisphere_area_and_curvatures() {
        let h = Hemisphere::new(2.0, 0.0).unwrap();
        let area = 2.0 * PI * h.integrate(&|p| p.r);
        assert!((area - 8.0 * PI).abs() < 1e-12);
        let p = h.point(1.0);
        assert!((p.mean_curvature() + 0.5).abs() < 1e-15);
        assert!((p.gauss_curvature() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn head_and_tail_split_covers_curve() {
        let h = Hemisphere::new(1.5, 0.3).unwrap();
        let whole = h.integrate(&|p| p.r * p.cos_phi);
        let split = h.integrate_above(1e-9, &|p| p.r * p.cos_phi);
        assert!((whole - split).abs() < 1e-8);
    }

    #[test]
    fn nonpositive_radius_rejected() {
        assert_eq!(Hemisphere::new(0.0, 1.0), Err(crate::Error::NonPositiveRadius(0.0)));
    }
}

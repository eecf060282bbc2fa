//! Triangulated surfaces of revolution, the ball model map and residual
//! tables for plotting.

use std::collections::HashMap;
use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::curve::GeneratingCurve;
use crate::profile::{trace_profile, ModelParams, ProfileSolution};
use crate::shooting::mean_of;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MeshModel {
    HalfSpace,
    Ball,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RevolutionMesh {
    pub vertices: Vec<[f64; 3]>,
    pub faces: Vec<[usize; 3]>,
    pub model: MeshModel,
    pub closed: bool,
}

fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn norm(a: [f64; 3]) -> f64 {
    (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt()
}

impl RevolutionMesh {
    pub fn area(&self) -> f64 {
        self.faces
            .iter()
            .map(|f| {
                let [a, b, c] = f.map(|i| self.vertices[i]);
                0.5 * norm(cross(sub(b, a), sub(c, a)))
            })
            .sum()
    }

    /// Number of faces sharing each undirected edge.
    pub fn edge_counts(&self) -> HashMap<(usize, usize), usize> {
        let mut edges = HashMap::new();
        for f in &self.faces {
            for k in 0..3 {
                let (a, b) = (f[k], f[(k + 1) % 3]);
                *edges.entry((a.min(b), a.max(b))).or_insert(0) += 1;
            }
        }
        edges
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertices.len() as i64 - self.edge_counts().len() as i64 + self.faces.len() as i64
    }

    pub fn is_watertight(&self) -> bool {
        self.edge_counts().values().all(|&n| n == 2)
    }
}

/// Sweep the generating curve around the z axis.
///
/// Rings sit at σ_j = j σ_b / n_sigma for j = 1..=n_sigma; with `reflect`
/// the mirror image under z ↦ −z is appended and closed at the south pole.
pub fn revolve(curve: &dyn GeneratingCurve, n_theta: usize, n_sigma: usize, reflect: bool) -> Result<RevolutionMesh> {
    if n_theta < 3 || n_sigma < 2 {
        return Err(Error::DegenerateResolution { n_theta, n_sigma });
    }
    let sb = curve.sigma_b();
    let mut rings: Vec<(f64, f64)> = (1..=n_sigma)
        .map(|j| {
            let p = curve.point(sb * j as f64 / n_sigma as f64);
            (p.r, p.z)
        })
        .collect();
    if let Some(last) = rings.last_mut() {
        last.1 = 0.0;
    }
    let top = curve.point(0.0).z;
    if reflect {
        let mirrored: Vec<(f64, f64)> = rings[..n_sigma - 1].iter().rev().map(|&(r, z)| (r, -z)).collect();
        rings.extend(mirrored);
    }
    let thetas: Vec<(f64, f64)> = (0..n_theta)
        .map(|k| (2.0 * PI * k as f64 / n_theta as f64).sin_cos())
        .collect();
    let mut vertices = vec![[0.0, 0.0, top]];
    for &(r, z) in &rings {
        for &(s, c) in &thetas {
            vertices.push([r * c, r * s, z]);
        }
    }
    let idx = |j: usize, k: usize| 1 + j * n_theta + (k % n_theta);
    let mut faces = Vec::new();
    for k in 0..n_theta {
        faces.push([0, idx(0, k), idx(0, k + 1)]);
    }
    for j in 0..rings.len() - 1 {
        for k in 0..n_theta {
            faces.push([idx(j, k), idx(j + 1, k), idx(j, k + 1)]);
            faces.push([idx(j + 1, k), idx(j + 1, k + 1), idx(j, k + 1)]);
        }
    }
    if reflect {
        let south = vertices.len();
        vertices.push([0.0, 0.0, -top]);
        let last = rings.len() - 1;
        for k in 0..n_theta {
            faces.push([south, idx(last, k + 1), idx(last, k)]);
        }
    }
    Ok(RevolutionMesh { vertices, faces, model: MeshModel::HalfSpace, closed: reflect })
}

pub fn revolve_profile(sol: &ProfileSolution, n_theta: usize, n_sigma: usize, reflect: bool) -> Result<RevolutionMesh> {
    if !sol.is_boundary() {
        return Err(Error::NoBoundaryData);
    }
    revolve(sol, n_theta, n_sigma, reflect)
}

/// (x, y, z) ↦ (2x, 2y, x² + y² + z² − 1) / (x² + y² + (z + 1)²).
pub fn to_ball_model(p: [f64; 3]) -> Result<[f64; 3]> {
    let [x, y, z] = p;
    let d = x * x + y * y + (z + 1.0) * (z + 1.0);
    if d == 0.0 {
        return Err(Error::PointAtSouthPoleSingularity);
    }
    Ok([2.0 * x / d, 2.0 * y / d, (x * x + y * y + z * z - 1.0) / d])
}

pub fn mesh_to_ball(mesh: &RevolutionMesh) -> Result<RevolutionMesh> {
    let vertices = mesh.vertices.iter().map(|&v| to_ball_model(v)).collect::<Result<Vec<_>>>()?;
    Ok(RevolutionMesh { vertices, model: MeshModel::Ball, ..mesh.clone() })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualRow {
    pub z0: f64,
    pub residual_mean: Option<f64>,
    pub residual_phi2: Option<f64>,
    pub reason: Option<String>,
}

/// Both shooting residuals on a grid of initial heights.
pub fn residual_curve_data(params: &ModelParams, z_grid: &[f64]) -> Vec<ResidualRow> {
    z_grid
        .par_iter()
        .map(|&z0| match trace_profile(params, z0) {
            Ok(sol) if sol.is_boundary() => ResidualRow {
                z0,
                residual_mean: Some(mean_of(&sol)),
                residual_phi2: Some(sol.d2phi_b),
                reason: None,
            },
            Ok(sol) => ResidualRow {
                z0,
                residual_mean: None,
                residual_phi2: None,
                reason: sol.failure().map(|e| e.to_string()),
            },
            Err(e) => ResidualRow { z0, residual_mean: None, residual_phi2: None, reason: Some(e.to_string()) },
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::Hemisphere;

    #[test]
    fn ball_map_values() {
        assert_eq!(to_ball_model([0.0, 0.0, 1.0]).unwrap(), [0.0, 0.0, 0.0]);
        assert_eq!(to_ball_model([1.0, 0.0, 0.0]).unwrap(), [1.0, 0.0, 0.0]);
        assert_eq!(to_ball_model([0.0, 0.0, 3.0]).unwrap(), [0.0, 0.0, 0.5]);
        assert_eq!(to_ball_model([0.0, 0.0, -1.0]), Err(Error::PointAtSouthPoleSingularity));
    }

    #[test]
    fn counts_and_topology() {
        let h = Hemisphere::new(1.0, 0.0).unwrap();
        let open = revolve(&h, 4, 2, false).unwrap();
        assert_eq!(open.vertices.len(), 9);
        assert_eq!(open.euler_characteristic(), 1);
        let closed = revolve(&h, 12, 7, true).unwrap();
        assert_eq!(closed.vertices.len(), (2 * 7 - 1) * 12 + 2);
        assert_eq!(closed.euler_characteristic(), 2);
        assert!(closed.is_watertight());
        for v in &closed.vertices {
            assert!((norm(*v) - 1.0).abs() < 1e-10);
        }
        assert_eq!(
            revolve(&h, 2, 5, false),
            Err(Error::DegenerateResolution { n_theta: 2, n_sigma: 5 })
        );
    }

    #[test]
    fn faces_point_outward() {
        let h = Hemisphere::new(1.0, 0.0).unwrap();
        let m = revolve(&h, 16, 8, true).unwrap();
        for f in &m.faces {
            let [a, b, c] = f.map(|i| m.vertices[i]);
            let n = cross(sub(b, a), sub(c, a));
            let centroid = [(a[0] + b[0] + c[0]) / 3.0, (a[1] + b[1] + c[1]) / 3.0, (a[2] + b[2] + c[2]) / 3.0];
            let dot = n[0] * centroid[0] + n[1] * centroid[1] + n[2] * centroid[2];
            assert!(dot > 0.0);
        }
    }

    #[test]
    fn empty_grid_gives_empty_table() {
        assert!(residual_curve_data(&ModelParams::new(1.0), &[]).is_empty());
    }
}

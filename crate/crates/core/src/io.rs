//! OBJ, CSV and JSON output with atomic writes, and profile CSV input.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;
use std::str::FromStr;

use crate::curve::{SampleRow, SampledCurve};
use crate::geometry::{ResidualRow, RevolutionMesh};
use crate::profile::ProfileSolution;
use crate::{Error, Result};

pub const PROFILE_HEADER: [&str; 7] = ["sigma", "r", "z", "phi", "H", "K", "nu3"];
pub const RESIDUAL_HEADER: [&str; 3] = ["z0", "residual_mean", "residual_phi2"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Obj,
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "obj" => Ok(Self::Obj),
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(Error::InvalidParameter(format!("unknown format {other:?}"))),
        }
    }
}

pub enum Artifact<'a> {
    Mesh(&'a RevolutionMesh),
    Profile(&'a ProfileSolution),
    Residuals(&'a [ResidualRow]),
    Json(&'a serde_json::Value),
}

/// Shortest representation that parses back to the same double.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

pub fn mesh_obj(mesh: &RevolutionMesh) -> String {
    let mut out = String::new();
    for v in &mesh.vertices {
        let _ = writeln!(out, "v {} {} {}", fmt_f64(v[0]), fmt_f64(v[1]), fmt_f64(v[2]));
    }
    for f in &mesh.faces {
        let _ = writeln!(out, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1);
    }
    out
}

fn csv_string(header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(|e| Error::Parse(e.to_string()))?;
    for row in rows {
        w.write_record(&row).map_err(|e| Error::Parse(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Parse(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
}

pub fn profile_csv(sol: &ProfileSolution) -> Result<String> {
    let rows = sol.sample_points().into_iter().map(|p| {
        [p.sigma, p.r, p.z, p.phi, p.mean_curvature(), p.gauss_curvature(), p.cos_phi]
            .iter()
            .map(|&x| fmt_f64(x))
            .collect()
    });
    csv_string(&PROFILE_HEADER, rows)
}

pub fn residual_csv(rows: &[ResidualRow]) -> Result<String> {
    let opt = |x: Option<f64>| x.map(fmt_f64).unwrap_or_default();
    let rows = rows
        .iter()
        .map(|r| vec![fmt_f64(r.z0), opt(r.residual_mean), opt(r.residual_phi2)]);
    csv_string(&RESIDUAL_HEADER, rows)
}

fn io_err(path: &Path, e: impl ToString) -> Error {
    Error::IoFailure { path: path.display().to_string(), cause: e.to_string() }
}

/// Write through a temporary file in the target directory and rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| io_err(path, e))?;
    tmp.write_all(bytes).map_err(|e| io_err(path, e))?;
    tmp.flush().map_err(|e| io_err(path, e))?;
    tmp.persist(path).map_err(|e| io_err(path, e.error))?;
    Ok(())
}

pub fn write_artifact(data: &Artifact<'_>, format: Format, path: &Path) -> Result<()> {
    let text = match (data, format) {
        (Artifact::Mesh(m), Format::Obj) => mesh_obj(m),
        (Artifact::Profile(p), Format::Csv) => profile_csv(p)?,
        (Artifact::Residuals(r), Format::Csv) => residual_csv(r)?,
        (Artifact::Json(v), Format::Json) => {
            let mut s = serde_json::to_string_pretty(v).map_err(|e| Error::Parse(e.to_string()))?;
            s.push('\n');
            s
        }
        _ => return Err(Error::InvalidParameter(format!("{format:?} does not match the data kind"))),
    };
    write_atomic(path, text.as_bytes())
}

/// Read a profile CSV with header `sigma,r,z,phi,H,K,nu3`.
pub fn read_profile_csv(path: &Path, c0: f64) -> Result<SampledCurve> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| io_err(path, e))?;
    let header = reader.headers().map_err(|e| Error::Parse(e.to_string()))?.clone();
    if header.iter().collect::<Vec<_>>() != PROFILE_HEADER {
        return Err(Error::Parse(format!("unexpected header {:?}", header.iter().collect::<Vec<_>>())));
    }
    let mut rows = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| Error::Parse(e.to_string()))?;
        let v: Vec<f64> = rec
            .iter()
            .map(|s| s.trim().parse::<f64>().map_err(|e| Error::Parse(format!("{s:?}: {e}"))))
            .collect::<Result<_>>()?;
        rows.push(SampleRow { sigma: v[0], r: v[1], z: v[2], phi: v[3], h: v[4] });
    }
    SampledCurve::new(rows, c0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::Hemisphere;
    use crate::functionals::hemisphere_oracle;
    use crate::geometry::revolve;

    #[test]
    fn obj_has_one_line_per_vertex() {
        let m = revolve(&Hemisphere::new(1.0, 0.0).unwrap(), 4, 2, false).unwrap();
        let text = mesh_obj(&m);
        assert_eq!(text.lines().filter(|l| l.starts_with("v ")).count(), 9);
        assert_eq!(text.lines().filter(|l| l.starts_with("f ")).count(), m.faces.len());
    }

    #[test]
    fn json_round_trips_doubles() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("report.json");
        let report = hemisphere_oracle(1.3, 0.7).unwrap();
        let v = serde_json::to_value(report).unwrap();
        write_artifact(&Artifact::Json(&v), Format::Json, &path).unwrap();
        let back: crate::functionals::EnergyReport =
            serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        assert_eq!(back, report);
    }

    #[test]
    fn invalid_path_is_io_failure() {
        let v = serde_json::json!({});
        let err = write_artifact(&Artifact::Json(&v), Format::Json, Path::new("/nonexistent/dir/x.json"));
        assert!(matches!(err, Err(Error::IoFailure { .. })));
    }

    #[test]
    fn format_mismatch_rejected() {
        let v = serde_json::json!({});
        assert!(write_artifact(&Artifact::Json(&v), Format::Obj, Path::new("x.obj")).is_err());
    }
}

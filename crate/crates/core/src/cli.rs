//! Command-line front end.

use std::ffi::OsString;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::curve::{GeneratingCurve, Hemisphere};
use crate::functionals::{area_regularized, area_regularized_limit, energy_report, hemisphere_oracle};
use crate::geometry::{mesh_to_ball, residual_curve_data, revolve_profile};
use crate::io::{read_profile_csv, residual_csv, profile_csv, write_artifact, write_atomic, Artifact, Format};
use crate::profile::{integrate_profile, ModelParams};
use crate::shooting::{find_equilibria_with_window, geometric_grid, ROOT_TOL, SAMPLES_PER_DOUBLING};
use crate::verify::{verify_profile, Tolerances};
use crate::Error;

#[derive(Debug, Parser)]
#[command(name = "hyperhelfrich", version, about = "Axisymmetric reduced-membrane profiles and regularized energies")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate one profile and write it as CSV.
    Integrate(ProfileArgs),
    /// Tabulate both shooting residuals on a geometric grid of z0.
    Scan(ScanArgs),
    /// Find the first equilibria in increasing z0.
    Find(FindArgs),
    /// Regularized energies of a profile or of a hemisphere.
    Energy(EnergyArgs),
    /// Run all certificates on one profile.
    Verify(ProfileArgs),
    /// Write the surface of revolution as an OBJ mesh.
    Export(ExportArgs),
    /// Closed-form reference values.
    Oracle {
        #[command(subcommand)]
        target: OracleTarget,
    },
}

fn non_negative(s: &str) -> Result<f64, String> {
    let x: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if x.is_finite() && x >= 0.0 {
        Ok(x)
    } else {
        Err(format!("expected a finite value >= 0, got {s}"))
    }
}

fn positive(s: &str) -> Result<f64, String> {
    let x: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if x.is_finite() && x > 0.0 {
        Ok(x)
    } else {
        Err(format!("expected a finite value > 0, got {s}"))
    }
}

fn nonzero(s: &str) -> Result<f64, String> {
    let x: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if x.is_finite() && x != 0.0 {
        Ok(x)
    } else {
        Err(format!("expected a finite non-zero value, got {s}"))
    }
}

/// Integrator controls shared by every profile command.
#[derive(Debug, Clone, Copy, Args, Serialize)]
pub struct NumericArgs {
    /// Absolute tolerance of the integrator.
    #[arg(long, default_value_t = 1e-10, value_parser = positive)]
    pub abs_tol: f64,
    /// Relative tolerance of the integrator.
    #[arg(long, default_value_t = 1e-10, value_parser = positive)]
    pub rel_tol: f64,
    /// Pole start offset [default: 1e-4*max(|z0|,1)].
    #[arg(long, value_parser = positive)]
    pub sigma0: Option<f64>,
    /// Stop height of the arc-length phase as a fraction of z0.
    #[arg(long, default_value_t = 1e-6, value_parser = positive)]
    pub z_cutoff_factor: f64,
    /// Arc-length budget.
    #[arg(long, default_value_t = 1e3, value_parser = positive)]
    pub sigma_max: f64,
    /// Largest switch height to the z variable as a fraction of z0.
    #[arg(long, default_value_t = 0.05, value_parser = positive)]
    pub switch_fraction: f64,
}

impl NumericArgs {
    pub fn params(&self, c0: f64) -> ModelParams {
        ModelParams {
            c0,
            abs_tol: self.abs_tol,
            rel_tol: self.rel_tol,
            sigma0: self.sigma0,
            z_cutoff_factor: self.z_cutoff_factor,
            sigma_max: self.sigma_max,
            switch_fraction: self.switch_fraction,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct ProfileArgs {
    /// Spontaneous curvature.
    #[arg(long, value_parser = non_negative)]
    pub c0: f64,
    /// Height of the pole.
    #[arg(long, allow_hyphen_values = true, value_parser = nonzero)]
    pub z0: f64,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub numeric: NumericArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ScanArgs {
    #[arg(long, value_parser = non_negative)]
    pub c0: f64,
    #[arg(long, value_parser = positive)]
    pub zmin: f64,
    #[arg(long, value_parser = positive)]
    pub zmax: f64,
    /// Number of grid points, at least 2.
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub numeric: NumericArgs,
}

#[derive(Debug, Clone, Args)]
pub struct FindArgs {
    #[arg(long, value_parser = non_negative)]
    pub c0: f64,
    /// Number of equilibria, at least 1.
    #[arg(long, default_value_t = 6)]
    pub count: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub numeric: NumericArgs,
}

#[derive(Debug, Clone, Args)]
#[command(args_conflicts_with_subcommands = true)]
pub struct EnergyArgs {
    /// Profile CSV with header sigma,r,z,phi,H,K,nu3.
    #[arg(long, conflicts_with = "z0")]
    pub profile: Option<PathBuf>,
    /// Spontaneous curvature; inferred from the profile CSV when absent.
    #[arg(long, value_parser = non_negative)]
    pub c0: Option<f64>,
    #[arg(long, allow_hyphen_values = true, value_parser = nonzero, requires = "c0")]
    pub z0: Option<f64>,
    /// Also report both evaluations of A_R.
    #[arg(long)]
    pub both_methods: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub numeric: NumericArgs,
    #[command(subcommand)]
    pub target: Option<EnergyTarget>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum EnergyTarget {
    /// Hemisphere of radius R, evaluated by quadrature.
    Hemisphere(HemisphereArgs),
}

#[derive(Debug, Clone, Subcommand)]
pub enum OracleTarget {
    /// Closed-form energies of the hemisphere of radius R.
    Hemisphere(HemisphereArgs),
}

#[derive(Debug, Clone, Args)]
pub struct HemisphereArgs {
    #[arg(long = "R", value_parser = positive)]
    pub radius: f64,
    #[arg(long, value_parser = non_negative)]
    pub c0: f64,
    #[arg(long)]
    pub both_methods: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ExportArgs {
    #[arg(long, value_parser = non_negative)]
    pub c0: f64,
    #[arg(long, allow_hyphen_values = true, value_parser = nonzero)]
    pub z0: f64,
    /// Append the mirror image under z -> -z.
    #[arg(long)]
    pub reflect: bool,
    /// Map vertices to the ball model.
    #[arg(long)]
    pub ball: bool,
    #[arg(long, default_value_t = 64)]
    pub ntheta: usize,
    #[arg(long, default_value_t = 128)]
    pub nsigma: usize,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub numeric: NumericArgs,
}

/// An error tagged with the stage that raised it.
#[derive(Debug)]
pub struct Failure {
    pub stage: &'static str,
    pub error: Error,
}

trait Stage<T> {
    fn at(self, stage: &'static str) -> Result<T, Failure>;
}

impl<T> Stage<T> for crate::Result<T> {
    fn at(self, stage: &'static str) -> Result<T, Failure> {
        self.map_err(|error| Failure { stage, error })
    }
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable")
}

fn emit_json(v: &Value, out: Option<&Path>) -> Result<(), Failure> {
    match out {
        Some(p) => write_artifact(&Artifact::Json(v), Format::Json, p).at("write"),
        None => emit_text(&(serde_json::to_string_pretty(v).expect("serializable") + "\n"), None),
    }
}

fn emit_text(text: &str, out: Option<&Path>) -> Result<(), Failure> {
    match out {
        Some(p) => write_atomic(p, text.as_bytes()).at("write"),
        None => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush());
            Ok(())
        }
    }
}

fn profile_config(command: &str, params: &ModelParams, z0: f64) -> Value {
    json!({
        "command": command,
        "z0": z0,
        "params": params,
        "sigma0_effective": params.sigma0_for(z0),
    })
}

fn validated(numeric: &NumericArgs, c0: f64) -> Result<ModelParams, Failure> {
    let params = numeric.params(c0);
    params.validate().at("validate")?;
    Ok(params)
}

fn energy_value(curve: &dyn GeneratingCurve, both: bool, config: Value) -> Result<Value, Failure> {
    let report = energy_report(curve).at("energy")?;
    let mut v = json!({ "config": config, "report": report });
    if both {
        let regular = area_regularized(curve).at("energy")?;
        let (limit, err) = area_regularized_limit(curve).at("energy")?;
        v["A_R_methods"] = json!({ "regular": regular, "limit": limit, "limit_error_estimate": err });
    }
    Ok(v)
}

fn hemisphere_config(command: &str, h: &HemisphereArgs) -> Value {
    json!({ "command": command, "R": h.radius, "c0": h.c0 })
}

pub fn run(command: &Command) -> Result<(), Failure> {
    match command {
        Command::Integrate(a) => {
            let params = validated(&a.numeric, a.c0)?;
            let sol = integrate_profile(&params, a.z0).at("integrate")?;
            let csv = profile_csv(&sol).at("write")?;
            emit_text(&csv, a.out.as_deref())?;
            if a.out.is_some() {
                let summary = json!({
                    "config": profile_config("integrate", &params, a.z0),
                    "sigma_b": sol.sigma_b,
                    "r_b": sol.r_b,
                    "phi_b": sol.phi_b,
                    "rows": sol.sample_points().len(),
                });
                emit_json(&summary, None)?;
            }
            Ok(())
        }
        Command::Scan(a) => {
            let params = validated(&a.numeric, a.c0)?;
            if a.samples < 2 {
                return Err(Error::InvalidParameter("samples must be at least 2".into())).at("validate");
            }
            if !(a.zmin < a.zmax) {
                return Err(Error::EmptyRange { z_min: a.zmin, z_max: a.zmax }).at("validate");
            }
            let rows = residual_curve_data(&params, &geometric_grid(a.zmin, a.zmax, a.samples));
            for r in rows.iter().filter(|r| r.reason.is_some()) {
                eprintln!("scan: z0 = {:?}: {}", r.z0, r.reason.as_deref().unwrap_or_default());
            }
            emit_text(&residual_csv(&rows).at("write")?, a.out.as_deref())
        }
        Command::Find(a) => {
            let params = validated(&a.numeric, a.c0)?;
            if a.count == 0 {
                return Err(Error::InvalidParameter("count must be at least 1".into())).at("validate");
            }
            let (entries, window) = find_equilibria_with_window(&params, a.count).at("find")?;
            let records: Vec<Value> = entries
                .iter()
                .map(|e| {
                    let mut v = to_value(&e.record(window));
                    v["root_tolerance"] = json!(ROOT_TOL);
                    v["samples_per_doubling"] = json!(SAMPLES_PER_DOUBLING);
                    v
                })
                .collect();
            emit_json(&Value::Array(records), a.out.as_deref())
        }
        Command::Energy(a) => match &a.target {
            Some(EnergyTarget::Hemisphere(h)) => {
                let curve = Hemisphere::new(h.radius, h.c0).at("validate")?;
                let v = energy_value(&curve, h.both_methods, hemisphere_config("energy hemisphere", h))?;
                emit_json(&v, h.out.as_deref())
            }
            None => match (&a.profile, a.c0, a.z0) {
                (Some(path), c0, _) => {
                    let curve = read_profile_csv(path, c0.unwrap_or(0.0)).at("read")?;
                    let c0 = match c0 {
                        Some(c) => c,
                        None => curve
                            .implied_c0()
                            .ok_or_else(|| Error::Parse("cannot infer c0; pass --c0".into()))
                            .at("read")?,
                    };
                    let curve = crate::curve::SampledCurve::new(curve.rows().to_vec(), c0).at("read")?;
                    let config = json!({ "command": "energy", "profile": path.display().to_string(), "c0": c0 });
                    let v = energy_value(&curve, a.both_methods, config)?;
                    emit_json(&v, a.out.as_deref())
                }
                (None, Some(c0), Some(z0)) => {
                    let params = validated(&a.numeric, c0)?;
                    let sol = integrate_profile(&params, z0).at("integrate")?;
                    let v = energy_value(&sol, a.both_methods, profile_config("energy", &params, z0))?;
                    emit_json(&v, a.out.as_deref())
                }
                _ => Err(Error::InvalidParameter(
                    "energy needs --profile, --c0 with --z0, or the hemisphere subcommand".into(),
                ))
                .at("validate"),
            },
        },
        Command::Verify(a) => {
            let params = validated(&a.numeric, a.c0)?;
            let sol = integrate_profile(&params, a.z0).at("integrate")?;
            let report = verify_profile(&sol).at("verify")?;
            let mut config = profile_config("verify", &params, a.z0);
            config["tolerances"] = to_value(&Tolerances::default());
            emit_json(&json!({ "config": config, "report": report }), a.out.as_deref())
        }
        Command::Export(a) => {
            let params = validated(&a.numeric, a.c0)?;
            let sol = integrate_profile(&params, a.z0).at("integrate")?;
            let mut mesh = revolve_profile(&sol, a.ntheta, a.nsigma, a.reflect).at("mesh")?;
            if a.ball {
                mesh = mesh_to_ball(&mesh).at("ball")?;
            }
            write_artifact(&Artifact::Mesh(&mesh), Format::Obj, &a.out).at("write")?;
            let mut config = profile_config("export", &params, a.z0);
            config["ntheta"] = json!(a.ntheta);
            config["nsigma"] = json!(a.nsigma);
            config["reflect"] = json!(a.reflect);
            config["ball"] = json!(a.ball);
            let summary = json!({
                "config": config,
                "vertices": mesh.vertices.len(),
                "faces": mesh.faces.len(),
                "euler_characteristic": mesh.euler_characteristic(),
            });
            emit_json(&summary, None)
        }
        Command::Oracle { target: OracleTarget::Hemisphere(h) } => {
            let report = hemisphere_oracle(h.radius, h.c0).at("oracle")?;
            emit_json(&json!({ "config": hemisphere_config("oracle hemisphere", h), "report": report }), h.out.as_deref())
        }
    }
}

/// Parse `argv` (program name first), run, and return the exit code.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match run(&cli.command) {
        Ok(()) => 0,
        Err(Failure { stage, error }) => {
            eprintln!("error in stage {stage}: {error}");
            if error.is_validation() {
                1
            } else {
                2
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn command_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(dispatch(["hh", "integrate", "--c0", "-1", "--z0", "1"]), 1);
        assert_eq!(dispatch(["hh", "integrate", "--c0", "1", "--z0", "0"]), 1);
        assert_eq!(dispatch(["hh", "bogus"]), 1);
    }

    #[test]
    fn forbidden_height_is_validation() {
        assert_eq!(dispatch(["hh", "verify", "--c0", "1", "--z0", "-0.5"]), 1);
    }
}

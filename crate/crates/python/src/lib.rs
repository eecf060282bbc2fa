//! Python bindings for `hyperhelfrich`.

use hyperhelfrich::curve::Hemisphere;
use hyperhelfrich::functionals::{energy_report, hemisphere_oracle as oracle};
use hyperhelfrich::geometry::{revolve_profile, to_ball_model as ball_map};
use hyperhelfrich::profile::{integrate_profile as integrate, ModelParams, ProfileSolution};
use hyperhelfrich::shooting::{find_equilibria_with_window, residual_mean as mean_residual};
use hyperhelfrich::verify::verify_profile;
use hyperhelfrich::Error;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn py_err(e: Error) -> PyErr {
    if e.is_validation() {
        PyValueError::new_err(e.to_string())
    } else {
        PyRuntimeError::new_err(e.to_string())
    }
}

fn to_py<T: serde::Serialize>(py: Python<'_>, x: &T) -> PyResult<Py<PyAny>> {
    let s = serde_json::to_string(x).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    Ok(py.import("json")?.call_method1("loads", (s,))?.unbind())
}

/// Spontaneous curvature and integrator controls.
#[pyclass(name = "ModelParams", frozen)]
struct PyModelParams {
    inner: ModelParams,
}

#[pymethods]
impl PyModelParams {
    #[new]
    #[pyo3(signature = (c0, abs_tol=1e-10, rel_tol=1e-10, sigma0=None, z_cutoff_factor=1e-6, sigma_max=1e3, switch_fraction=0.05))]
    fn new(
        c0: f64,
        abs_tol: f64,
        rel_tol: f64,
        sigma0: Option<f64>,
        z_cutoff_factor: f64,
        sigma_max: f64,
        switch_fraction: f64,
    ) -> PyResult<Self> {
        let inner = ModelParams { c0, abs_tol, rel_tol, sigma0, z_cutoff_factor, sigma_max, switch_fraction };
        inner.validate().map_err(py_err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn c0(&self) -> f64 {
        self.inner.c0
    }

    #[getter]
    fn abs_tol(&self) -> f64 {
        self.inner.abs_tol
    }

    #[getter]
    fn rel_tol(&self) -> f64 {
        self.inner.rel_tol
    }

    #[getter]
    fn sigma0(&self) -> Option<f64> {
        self.inner.sigma0
    }

    fn __repr__(&self) -> String {
        format!("{:?}", self.inner)
    }
}

/// A generating curve from the pole to the plane z = 0.
#[pyclass(name = "Profile", frozen)]
struct PyProfile {
    inner: ProfileSolution,
}

#[pymethods]
impl PyProfile {
    #[getter]
    fn z0(&self) -> f64 {
        self.inner.input_z0()
    }

    #[getter]
    fn c0(&self) -> f64 {
        self.inner.params.c0
    }

    #[getter]
    fn sigma_b(&self) -> f64 {
        self.inner.sigma_b
    }

    #[getter]
    fn r_b(&self) -> f64 {
        self.inner.r_b
    }

    #[getter]
    fn phi_b(&self) -> f64 {
        self.inner.phi_b
    }

    #[getter]
    fn d2phi_b(&self) -> f64 {
        self.inner.d2phi_b
    }

    /// Rows (sigma, r, z, phi, H, K, nu3) of the dense output.
    fn samples(&self) -> Vec<(f64, f64, f64, f64, f64, f64, f64)> {
        self.inner
            .sample_points()
            .into_iter()
            .map(|p| (p.sigma, p.r, p.z, p.phi, p.mean_curvature(), p.gauss_curvature(), p.cos_phi))
            .collect()
    }

    fn energies(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        to_py(py, &energy_report(&self.inner).map_err(py_err)?)
    }

    fn verify(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        to_py(py, &verify_profile(&self.inner).map_err(py_err)?)
    }

    /// Vertices and 0-based faces of the surface of revolution.
    #[pyo3(signature = (n_theta=64, n_sigma=128, reflect=false))]
    fn mesh(&self, n_theta: usize, n_sigma: usize, reflect: bool) -> PyResult<(Vec<[f64; 3]>, Vec<[usize; 3]>)> {
        let m = revolve_profile(&self.inner, n_theta, n_sigma, reflect).map_err(py_err)?;
        Ok((m.vertices, m.faces))
    }

    fn __repr__(&self) -> String {
        format!(
            "Profile(c0={:?}, z0={:?}, sigma_b={:?}, r_b={:?})",
            self.inner.params.c0,
            self.inner.input_z0(),
            self.inner.sigma_b,
            self.inner.r_b
        )
    }
}

fn params_or_default(c0: f64, params: Option<&PyModelParams>) -> ModelParams {
    match params {
        Some(p) => ModelParams { c0, ..p.inner },
        None => ModelParams::new(c0),
    }
}

/// Integrate the profile with pole height `z0`.
#[pyfunction]
#[pyo3(signature = (c0, z0, params=None))]
fn integrate_profile(c0: f64, z0: f64, params: Option<PyRef<'_, PyModelParams>>) -> PyResult<PyProfile> {
    let p = params_or_default(c0, params.as_deref());
    integrate(&p, z0).map(|inner| PyProfile { inner }).map_err(py_err)
}

/// ∫(H + c0) r dσ of the profile with pole height `z0`.
#[pyfunction]
fn residual_mean(c0: f64, z0: f64) -> PyResult<f64> {
    mean_residual(&ModelParams::new(c0), z0).map_err(py_err)
}

/// First `count` equilibria as branch records.
#[pyfunction]
#[pyo3(signature = (c0, count=6))]
fn find_equilibria(py: Python<'_>, c0: f64, count: usize) -> PyResult<Vec<Py<PyAny>>> {
    let (entries, window) = find_equilibria_with_window(&ModelParams::new(c0), count).map_err(py_err)?;
    entries.iter().map(|e| to_py(py, &e.record(window))).collect()
}

/// Closed-form energies of the hemisphere of radius `radius`.
#[pyfunction]
fn hemisphere_oracle(py: Python<'_>, radius: f64, c0: f64) -> PyResult<Py<PyAny>> {
    to_py(py, &oracle(radius, c0).map_err(py_err)?)
}

/// Energies of the hemisphere evaluated by quadrature.
#[pyfunction]
fn hemisphere_energies(py: Python<'_>, radius: f64, c0: f64) -> PyResult<Py<PyAny>> {
    let h = Hemisphere::new(radius, c0).map_err(py_err)?;
    to_py(py, &energy_report(&h).map_err(py_err)?)
}

#[pyfunction]
fn to_ball_model(x: f64, y: f64, z: f64) -> PyResult<(f64, f64, f64)> {
    let [a, b, c] = ball_map([x, y, z]).map_err(py_err)?;
    Ok((a, b, c))
}

#[pymodule]
fn pyhyperhelfrich(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyModelParams>()?;
    m.add_class::<PyProfile>()?;
    m.add_function(wrap_pyfunction!(integrate_profile, m)?)?;
    m.add_function(wrap_pyfunction!(residual_mean, m)?)?;
    m.add_function(wrap_pyfunction!(find_equilibria, m)?)?;
    m.add_function(wrap_pyfunction!(hemisphere_oracle, m)?)?;
    m.add_function(wrap_pyfunction!(hemisphere_energies, m)?)?;
    m.add_function(wrap_pyfunction!(to_ball_model, m)?)?;
    Ok(())
}

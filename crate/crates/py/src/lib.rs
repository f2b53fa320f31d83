//! Python module `finitegap`.
//!
//! Curves, period data and solutions are exposed as classes; structured
//! reports (validation, charges) come back as plain dicts decoded from the
//! same JSON the command-line tool prints.

use finitegap::charge::{self, ChargeReport};
use finitegap::homology::PeriodData;
use finitegap::theta::ThetaContext;
use finitegap::{
    compute_periods, QuadratureOptions, SolutionParams, SpectralCurve, TorusPoint, C64,
};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyModule;

fn to_py(e: finitegap::Error) -> PyErr {
    match e {
        finitegap::Error::InvalidArgument(_) | finitegap::Error::InvalidCurve(_) => {
            PyValueError::new_err(e.to_string())
        }
        other => PyRuntimeError::new_err(other.to_string()),
    }
}

fn json_to_py<'py>(py: Python<'py>, text: &str) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (text,))
}

fn serialize<T: serde::Serialize>(value: &T) -> PyResult<String> {
    serde_json::to_string(value).map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

fn rows(m: &nalgebra::DMatrix<C64>) -> Vec<Vec<C64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

/// Hyperelliptic spectral curve `mu^2 = lambda * prod (lambda - E_i)`.
#[pyclass(name = "Curve", module = "finitegap", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyCurve {
    inner: SpectralCurve,
}

#[pymethods]
impl PyCurve {
    /// `real_pairs`: list of `(lo, hi)`; `complex_pairs`: one representative per conjugate pair.
    #[new]
    #[pyo3(signature = (real_pairs = Vec::new(), complex_pairs = Vec::new()))]
    fn new(real_pairs: Vec<(f64, f64)>, complex_pairs: Vec<C64>) -> PyResult<Self> {
        SpectralCurve::new(real_pairs, complex_pairs)
            .map(|inner| PyCurve { inner })
            .map_err(to_py)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        SpectralCurve::from_json(text)
            .map(|inner| PyCurve { inner })
            .map_err(|e| PyValueError::new_err(e.to_string()))
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    #[getter]
    fn genus(&self) -> usize {
        self.inner.genus()
    }

    #[getter]
    fn m(&self) -> usize {
        self.inner.m()
    }

    #[getter]
    fn branch_points(&self) -> Vec<C64> {
        self.inner.branch_points().to_vec()
    }

    fn validate<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        json_to_py(py, &serialize(&self.inner.validate())?)
    }

    fn scaled(&self, k: f64) -> PyResult<Self> {
        self.inner
            .scaled(k)
            .map(|inner| PyCurve { inner })
            .map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!("Curve({})", self.inner.to_json())
    }
}

/// Normalized period data of a curve.
#[pyclass(name = "Periods", module = "finitegap", frozen)]
pub struct PyPeriods {
    inner: PeriodData,
}

#[pymethods]
impl PyPeriods {
    #[getter]
    fn b(&self) -> Vec<Vec<C64>> {
        rows(&self.inner.b)
    }

    #[getter]
    fn u(&self) -> Vec<C64> {
        self.inner.u.clone()
    }

    #[getter]
    fn v(&self) -> Vec<C64> {
        self.inner.v.clone()
    }

    #[getter]
    fn k(&self) -> Vec<C64> {
        self.inner.k.clone()
    }

    #[getter]
    fn a0(&self) -> Vec<C64> {
        self.inner.a0.clone()
    }

    #[getter]
    fn curve(&self) -> PyCurve {
        PyCurve {
            inner: self.inner.curve.clone(),
        }
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    /// Charge density for a charge vector.
    fn density(&self, n: Vec<i64>) -> f64 {
        charge::density(&self.inner, &n)
    }
}

/// Computes period data; `tol` overrides the per-path quadrature tolerance.
#[pyfunction]
#[pyo3(signature = (curve, tol = None))]
fn period_data(py: Python<'_>, curve: &PyCurve, tol: Option<f64>) -> PyResult<PyPeriods> {
    let mut opts = QuadratureOptions::default();
    if let Some(t) = tol {
        opts.tol = t;
    }
    let c = curve.inner.clone();
    py.detach(move || compute_periods(&c, &opts))
        .map(|(inner, _)| PyPeriods { inner })
        .map_err(to_py)
}

/// Real finite-gap solution for a symbol vector `s` and torus point `x0`.
#[pyclass(name = "Solution", module = "finitegap", frozen)]
pub struct PySolution {
    inner: SolutionParams,
}

#[pymethods]
impl PySolution {
    #[new]
    #[pyo3(signature = (periods, s, x0, tol_theta = None))]
    fn new(
        periods: &PyPeriods,
        s: Vec<i8>,
        x0: Vec<f64>,
        tol_theta: Option<f64>,
    ) -> PyResult<Self> {
        let torus = TorusPoint::new(s, x0).map_err(to_py)?;
        let inner = match tol_theta {
            Some(t) => SolutionParams::with_theta_tol(&periods.inner, torus, t),
            None => SolutionParams::new(&periods.inner, torus),
        }
        .map_err(to_py)?;
        Ok(PySolution { inner })
    }

    fn exp_iu(&self, x: f64, t: f64) -> PyResult<C64> {
        self.inner.exp_iu(x, t).map_err(to_py)
    }

    /// Continuous `u` along straight segments through the given `(x, t)` points.
    fn u_along(&self, points: Vec<(f64, f64)>) -> PyResult<Vec<f64>> {
        self.inner.u_along(&points).map_err(to_py)
    }

    #[pyo3(signature = (x, t, h = 1e-3))]
    fn pde_residual(&self, x: f64, t: f64, h: f64) -> PyResult<f64> {
        self.inner.pde_residual(x, t, h).map_err(to_py)
    }

    fn charges(&self, py: Python<'_>) -> PyResult<Vec<i64>> {
        py.detach(|| charge::winding_charges(&self.inner))
            .map_err(to_py)
    }

    #[pyo3(signature = (horizon = charge::DEFAULT_HORIZON))]
    fn charge_report<'py>(&self, py: Python<'py>, horizon: f64) -> PyResult<Bound<'py, PyAny>> {
        let report: ChargeReport = py
            .detach(|| charge::charge_report(&self.inner, horizon))
            .map_err(to_py)?;
        json_to_py(py, &serialize(&report)?)
    }
}

/// The charge vector predicted from the symbols alone.
#[pyfunction]
fn closed_form_charges(g: usize, m: usize, s: Vec<i8>) -> PyResult<Vec<i64>> {
    charge::closed_form_charges(g, m, &s).map_err(to_py)
}

/// Riemann theta function of a symmetric matrix with positive imaginary part, any argument.
#[pyfunction]
#[pyo3(signature = (b, z, tol = 1e-13))]
fn theta(b: Vec<Vec<C64>>, z: Vec<C64>, tol: f64) -> PyResult<C64> {
    let g = b.len();
    if b.iter().any(|r| r.len() != g) {
        return Err(PyValueError::new_err("b must be square"));
    }
    let m = nalgebra::DMatrix::from_fn(g, g, |i, j| b[i][j]);
    ThetaContext::new(&m, tol)
        .and_then(|ctx| ctx.theta_any(&z))
        .map_err(to_py)
}

#[pymodule]
#[pyo3(name = "finitegap")]
pub fn finitegap_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyCurve>()?;
    m.add_class::<PyPeriods>()?;
    m.add_class::<PySolution>()?;
    m.add_function(wrap_pyfunction!(period_data, m)?)?;
    m.add_function(wrap_pyfunction!(closed_form_charges, m)?)?;
    m.add_function(wrap_pyfunction!(theta, m)?)?;
    Ok(())
}

//! Python bindings. Structured results cross the boundary as JSON and come
//! back as plain dicts and lists.

use pns::certificates::{cone_theta_min, CriticalCertificate};
use pns::scan::GridSpec;
use pns::sos::{is_sos as sos_check, BisectionOptions, FeasBackend};
use pns::{GeneratingVector, HankelError, SearchOptions, SlicePoint, Vec4};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn err(e: HankelError) -> PyErr {
    match e {
        HankelError::NonConvergence(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn to_py<'py, T: serde::Serialize>(py: Python<'py>, v: &T) -> PyResult<Bound<'py, PyAny>> {
    let s = serde_json::to_string(v).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (s,))
}

fn point(p: [f64; 5]) -> PyResult<SlicePoint> {
    SlicePoint::from_array(p).map_err(err)
}

fn vector(v: Vec<f64>) -> PyResult<GeneratingVector> {
    GeneratingVector::from_slice(&v).map_err(err)
}

/// Threshold of the symmetric binary quartic.
#[pyfunction]
fn eta(beta: f64, gamma: f64) -> f64 {
    pns::eta(beta, gamma)
}

/// Generating vector of length 13 for a slice point and v0.
#[pyfunction]
fn assemble(p: [f64; 5], v0: f64) -> PyResult<Vec<f64>> {
    Ok(pns::assemble(&point(p)?, v0).as_array().to_vec())
}

#[pyfunction]
fn evaluate(v: Vec<f64>, x: [f64; 4]) -> PyResult<f64> {
    Ok(vector(v)?.evaluate(&Vec4(x)))
}

/// Necessary conditions and degeneracy class as a dict.
#[pyfunction]
fn check<'py>(py: Python<'py>, v: Vec<f64>) -> PyResult<Bound<'py, PyAny>> {
    let v = vector(v)?;
    let out = serde_json::json!({
        "conditions": pns::check_necessary(&v),
        "degenerate": pns::classify_degenerate(&v),
    });
    to_py(py, &out)
}

/// Returns (value, witness).
#[pyfunction]
#[pyo3(signature = (p, n_starts=200, seed=0))]
fn n0(py: Python<'_>, p: [f64; 5], n_starts: usize, seed: u64) -> PyResult<(f64, [f64; 4])> {
    let p = point(p)?;
    let opts = SearchOptions { n_starts, seed, ..Default::default() };
    let r = py.detach(|| pns::n0(&p, &opts)).map_err(err)?;
    Ok((r.value, r.witness.0))
}

#[pyfunction]
#[pyo3(signature = (p, rel_tol=1e-4, backend="ipm", allow_boundary=false, seed=0))]
fn m0(py: Python<'_>, p: [f64; 5], rel_tol: f64, backend: &str, allow_boundary: bool, seed: u64) -> PyResult<f64> {
    let p = point(p)?;
    let mut opts = BisectionOptions {
        rel_tol,
        backend: backend.parse::<FeasBackend>().map_err(err)?,
        allow_boundary,
        ..Default::default()
    };
    opts.search.seed = seed;
    let r = py.detach(|| pns::m0(&p, &opts)).map_err(err)?;
    Ok(r.value)
}

/// SOS feasibility of the form with generating vector `v`.
#[pyfunction]
#[pyo3(signature = (v, tol=1e-8, max_iter=50_000, backend="ap"))]
fn is_sos(py: Python<'_>, v: Vec<f64>, tol: f64, max_iter: usize, backend: &str) -> PyResult<bool> {
    let q = vector(v)?.to_quartic();
    let b = backend.parse::<FeasBackend>().map_err(err)?;
    Ok(py.detach(|| sos_check(&q, tol, max_iter, b)).is_feasible())
}

/// Certificate JSON for the segment family.
#[pyfunction]
fn segment_certificate(t: f64) -> PyResult<String> {
    Ok(pns::segment_certificate(t).map_err(err)?.to_json())
}

#[pyfunction]
#[pyo3(signature = (b, theta=None))]
fn cone_certificate(b: f64, theta: Option<f64>) -> PyResult<String> {
    let theta = match theta {
        Some(t) => t,
        None => cone_theta_min(b).map_err(err)?,
    };
    Ok(pns::cone_certificate(b, theta).map_err(err)?.to_json())
}

#[pyfunction]
#[pyo3(signature = (cert, tol=1e-8))]
fn verify_certificate<'py>(py: Python<'py>, cert: &str, tol: f64) -> PyResult<Bound<'py, PyAny>> {
    let c = CriticalCertificate::from_json(cert).map_err(err)?;
    to_py(py, &pns::verify_certificate(&c, tol).map_err(err)?)
}

#[pyfunction]
fn ray_critical_value(rho: f64) -> PyResult<f64> {
    pns::ray_critical_value(rho).map_err(err)
}

#[pyfunction]
fn point_a_critical_value() -> f64 {
    pns::point_a_critical_value()
}

/// Grid scan. `axes` takes entries like "v2=0:1:5" or "v5=0.1".
#[pyfunction]
#[pyo3(signature = (axes=Vec::new(), table1=false, n_starts=200, seed=0))]
fn scan<'py>(
    py: Python<'py>,
    axes: Vec<String>,
    table1: bool,
    n_starts: usize,
    seed: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let mut spec = if table1 { GridSpec::table1() } else { GridSpec::default() };
    for a in &axes {
        spec.set_from_arg(a).map_err(err)?;
    }
    spec.options.search.n_starts = n_starts;
    spec.options.search.seed = seed;
    let out = py.detach(|| pns::run_scan(&spec)).map_err(err)?;
    to_py(py, &out.rows)
}

#[pymodule]
fn hankel_pns(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(eta, m)?)?;
    m.add_function(wrap_pyfunction!(assemble, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate, m)?)?;
    m.add_function(wrap_pyfunction!(check, m)?)?;
    m.add_function(wrap_pyfunction!(n0, m)?)?;
    m.add_function(wrap_pyfunction!(m0, m)?)?;
    m.add_function(wrap_pyfunction!(is_sos, m)?)?;
    m.add_function(wrap_pyfunction!(segment_certificate, m)?)?;
    m.add_function(wrap_pyfunction!(cone_certificate, m)?)?;
    m.add_function(wrap_pyfunction!(verify_certificate, m)?)?;
    m.add_function(wrap_pyfunction!(ray_critical_value, m)?)?;
    m.add_function(wrap_pyfunction!(point_a_critical_value, m)?)?;
    m.add_function(wrap_pyfunction!(scan, m)?)?;
    Ok(())
}

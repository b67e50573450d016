//! Python module `sandwich_py`. Reports are returned as JSON strings.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use sandwich_core::analytic::{box_spectrum, disk_spectrum};
use sandwich_core::certify::{mthm1_run, partition_certificate, CertConfig};
use sandwich_core::fem::{spectrum_with, FemConfig};
use sandwich_core::geometry::{ConvexBody, Point, Polygon};
use sandwich_core::harness::{parse_builtin, run_suite, Lab, Suite};
use sandwich_core::{BoundaryCondition, Error};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::NotConverged { .. } | Error::Io(_) | Error::LowEfficiency { .. } => {
            PyRuntimeError::new_err(e.to_string())
        }
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn bc(name: &str) -> PyResult<BoundaryCondition> {
    name.parse().map_err(to_py)
}

fn config(c_sep: f64, slack: f64, seed: u64) -> PyResult<CertConfig> {
    let cfg = CertConfig {
        c_sep,
        slack,
        seed,
        ..CertConfig::default()
    };
    cfg.validate().map_err(to_py)?;
    Ok(cfg)
}

fn json<T: serde::Serialize>(v: &T) -> PyResult<String> {
    serde_json::to_string(v).map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

/// FEM eigenvalues of a builtin domain (`square`, `box:LxW`, `disk:r`, ...).
#[pyfunction]
#[pyo3(signature = (domain, bc_name = "neumann", k = 5, h = None, seed = 0))]
fn spectrum(
    domain: &str,
    bc_name: &str,
    k: usize,
    h: Option<f64>,
    seed: u64,
) -> PyResult<Vec<f64>> {
    let body = parse_builtin(domain).map_err(to_py)?;
    let h = h.unwrap_or_else(|| CertConfig::default().h_for(&body));
    let res =
        spectrum_with(&body, bc(bc_name)?, k, h, seed, &FemConfig::default()).map_err(to_py)?;
    Ok(res.spectrum.values)
}

/// FEM eigenvalues of the polygon with the given vertices.
#[pyfunction]
#[pyo3(signature = (vertices, bc_name = "neumann", k = 5, h = None, seed = 0))]
fn polygon_spectrum(
    vertices: Vec<(f64, f64)>,
    bc_name: &str,
    k: usize,
    h: Option<f64>,
    seed: u64,
) -> PyResult<Vec<f64>> {
    let poly = Polygon::new(
        vertices
            .into_iter()
            .map(|(x, y)| Point::new(x, y))
            .collect(),
    )
    .map_err(to_py)?;
    let body = ConvexBody::from(poly);
    let h = h.unwrap_or_else(|| CertConfig::default().h_for(&body));
    let res =
        spectrum_with(&body, bc(bc_name)?, k, h, seed, &FemConfig::default()).map_err(to_py)?;
    Ok(res.spectrum.values)
}

/// Exact eigenvalues of a box with the given side lengths.
#[pyfunction]
#[pyo3(signature = (lengths, bc_name = "neumann", count = 5))]
fn box_eigenvalues(lengths: Vec<f64>, bc_name: &str, count: usize) -> PyResult<Vec<f64>> {
    Ok(box_spectrum(&lengths, bc(bc_name)?, count)
        .map_err(to_py)?
        .values)
}

/// Exact eigenvalues of a disk from the tabulated Bessel zeros.
#[pyfunction]
#[pyo3(signature = (radius, bc_name = "neumann", count = 5))]
fn disk_eigenvalues(radius: f64, bc_name: &str, count: usize) -> PyResult<Vec<f64>> {
    Ok(disk_spectrum(radius, bc(bc_name)?, count)
        .map_err(to_py)?
        .values)
}

/// Net pipeline certificate for `lambda_{k-1}` of a builtin domain, as JSON.
#[pyfunction]
#[pyo3(signature = (domain, k = 2, c_sep = 1.0, slack = 0.05, seed = 0))]
fn certify(domain: &str, k: usize, c_sep: f64, slack: f64, seed: u64) -> PyResult<String> {
    let body = parse_builtin(domain).map_err(to_py)?;
    let report = mthm1_run(&body, &body, k, &config(c_sep, slack, seed)?).map_err(to_py)?;
    json(&report)
}

/// Certificate from a `count`-piece Voronoi partition, as JSON.
#[pyfunction]
#[pyo3(signature = (domain, count, seed = 0))]
fn partition(domain: &str, count: usize, seed: u64) -> PyResult<String> {
    let body = parse_builtin(domain).map_err(to_py)?;
    let cert = partition_certificate(&body, count, &config(1.0, 0.05, seed)?).map_err(to_py)?;
    json(&cert)
}

/// One verification suite report, as JSON without timestamps.
#[pyfunction]
#[pyo3(signature = (suite, seed = 0))]
fn verify(suite: &str, seed: u64) -> PyResult<String> {
    let s = Suite::from_name(suite).map_err(to_py)?;
    let lab = Lab::new(config(1.0, 0.05, seed)?).map_err(to_py)?;
    Ok(run_suite(s, &lab).map_err(to_py)?.to_json())
}

#[pymodule]
fn sandwich_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(polygon_spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(box_eigenvalues, m)?)?;
    m.add_function(wrap_pyfunction!(disk_eigenvalues, m)?)?;
    m.add_function(wrap_pyfunction!(certify, m)?)?;
    m.add_function(wrap_pyfunction!(partition, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}

//! Python bindings. Every entry point returns the same JSON document the CLI
//! prints, as a string.

use std::path::PathBuf;

use orvidx::cli::{cmd_analyze_fn, cmd_analyze_seq, cmd_verify, RunConfig, Source};
use orvidx::Error;
use pyo3::exceptions::{PyOSError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Io(_) => PyOSError::new_err(e.to_string()),
        Error::Input(_) | Error::Domain(_) | Error::Construction(_) => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn config(
    command: &str,
    family: Option<String>,
    input: Option<String>,
    pmax: Option<usize>,
    xmax: Option<f64>,
    tol: f64,
    suite: Option<String>,
) -> PyResult<RunConfig> {
    let source = match (family, input) {
        (Some(f), None) => Some(Source::Family(f)),
        (None, Some(p)) => Some(Source::Csv(PathBuf::from(p))),
        (None, None) if command == "verify" => None,
        _ => return Err(PyValueError::new_err("give exactly one of family or input")),
    };
    let cfg = RunConfig {
        command: command.to_string(),
        source,
        pmax,
        x_max: xmax,
        tol,
        out: None,
        plot: None,
        suite,
    };
    cfg.validate().map_err(to_py)?;
    Ok(cfg)
}

fn pretty(v: &serde_json::Value) -> String {
    serde_json::to_string_pretty(v).expect("report serializes")
}

/// Analyze a weight sequence given by a family spec or a `p,log_m` CSV file.
#[pyfunction]
#[pyo3(signature = (family=None, *, input=None, pmax=None, tol=0.05))]
fn analyze_seq(py: Python<'_>, family: Option<String>, input: Option<String>, pmax: Option<usize>, tol: f64) -> PyResult<String> {
    let cfg = config("analyze-seq", family, input, pmax, None, tol, None)?;
    py.detach(|| cmd_analyze_seq(&cfg)).map(|(v, _)| pretty(&v)).map_err(to_py)
}

/// Analyze a weight function given by a family spec or a `t,sigma` CSV file.
#[pyfunction]
#[pyo3(signature = (family=None, *, input=None, xmax=None, tol=0.05))]
fn analyze_fn(py: Python<'_>, family: Option<String>, input: Option<String>, xmax: Option<f64>, tol: f64) -> PyResult<String> {
    let cfg = config("analyze-fn", family, input, None, xmax, tol, None)?;
    py.detach(|| cmd_analyze_fn(&cfg)).map(|(v, _)| pretty(&v)).map_err(to_py)
}

/// Run a verification suite.
#[pyfunction]
#[pyo3(signature = (suite="all", *, pmax=None, tol=0.05))]
fn verify(py: Python<'_>, suite: &str, pmax: Option<usize>, tol: f64) -> PyResult<String> {
    let cfg = config("verify", None, None, pmax, None, tol, Some(suite.to_string()))?;
    py.detach(|| cmd_verify(&cfg)).map(|v| pretty(&v)).map_err(to_py)
}

#[pymodule]
fn orvidx_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(analyze_seq, m)?)?;
    m.add_function(wrap_pyfunction!(analyze_fn, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add("SUITES", orvidx::suites::SUITES.to_vec())?;
    Ok(())
}

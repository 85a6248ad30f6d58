//! Python bindings. Every entry point returns the same JSON report the
//! command-line tool prints, decoded into Python objects.

use clap::Parser;
use cthulhu::catalog::enumerate_labels;
use cthulhu::cli::{execute, exit_code_for, Cli};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn to_py(py: Python<'_>, v: &serde_json::Value) -> PyResult<Py<PyAny>> {
    let text = serde_json::to_string(v).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    Ok(py.import("json")?.call_method1("loads", (text,))?.unbind())
}

/// Run a command line (without the program name) and return
/// `(report, exit_code)`. Usage errors raise `ValueError`; failures that
/// carry an exit code raise `RuntimeError`.
#[pyfunction]
fn run(py: Python<'_>, args: Vec<String>) -> PyResult<(Py<PyAny>, i32)> {
    let cli = Cli::try_parse_from(std::iter::once("cthulhu".to_string()).chain(args))
        .map_err(|e| PyValueError::new_err(e.to_string()))?;
    let out = py.detach(|| execute(&cli.command));
    match out {
        Ok((report, code)) => Ok((to_py(py, &report)?, code)),
        Err(e) => {
            let code = exit_code_for(&e);
            let msg = format!("{e} (exit code {code})");
            Err(if code == 64 { PyValueError::new_err(msg) } else { PyRuntimeError::new_err(msg) })
        }
    }
}

/// Nontrivial unipotent labels of `Sp_{2n}(q)`.
#[pyfunction]
fn labels(n: usize, q: u64) -> PyResult<Vec<String>> {
    enumerate_labels(n, q)
        .map(|v| v.iter().map(ToString::to_string).collect())
        .map_err(|e| PyValueError::new_err(e.to_string()))
}

/// Classify one rational class of `Sp_{2n}(q)` without touching the cache.
#[pyfunction]
#[pyo3(signature = (n, q, label, split=None, seed=0))]
fn classify(py: Python<'_>, n: usize, q: u64, label: &str, split: Option<usize>, seed: u64) -> PyResult<(Py<PyAny>, i32)> {
    let mut args: Vec<String> = ["classify", "--family", "sp", "--n", &n.to_string(), "--q", &q.to_string(), "--label", label]
        .iter()
        .map(|s| s.to_string())
        .collect();
    if let Some(s) = split {
        args.extend(["--split".into(), s.to_string()]);
    }
    args.extend(["--seed".into(), seed.to_string(), "--no-cache".into()]);
    run(py, args)
}

#[pymodule]
fn cthulhu_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(labels, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}

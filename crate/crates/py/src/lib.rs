//! Python bindings: a thin layer over the core library and its CLI.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use quasitree::bassserre::classify_trichotomy;
use quasitree::formats::{parse_gog, parse_tree};
use quasitree::gog::{injection_index as index_of, InjectionSpec};
use quasitree::linalg::IntMatrix;
use quasitree::patterns::cross_ratio_int;
use quasitree::quasiedges::{qe_constant as constant_of, BoundedTree, QuasiEdge};

fn py_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Runs the command line with `args` (without the program name) and
/// returns `(exit_code, stdout)`.
#[pyfunction]
fn run_cli(args: Vec<String>) -> (i32, String) {
    quasitree::cli::run(std::iter::once("quasitree".to_string()).chain(args))
}

#[pyfunction]
fn classify(gog_text: &str) -> PyResult<String> {
    let g = parse_gog(gog_text).map_err(py_err)?;
    Ok(classify_trichotomy(&g).map_err(py_err)?.to_string())
}

/// Index of the column lattice of a square integer matrix given by rows;
/// `None` when infinite.
#[pyfunction]
fn injection_index(rows: Vec<Vec<i64>>) -> PyResult<Option<u64>> {
    let n = rows.len();
    let m = IntMatrix::from_rows(&rows).ok_or_else(|| py_err("rows must be nonempty and of equal length"))?;
    let cols = m.cols();
    match index_of(&InjectionSpec::Matrix(m), n, cols).map_err(py_err)? {
        quasitree::gog::Index::Finite(k) => Ok(Some(k)),
        quasitree::gog::Index::Inf => Ok(None),
    }
}

/// Cross-ratio of four lines through the origin as `(numerator, denominator)`.
#[pyfunction]
fn cross_ratio(lines: [[i64; 2]; 4]) -> PyResult<(String, String)> {
    let c = cross_ratio_int(lines).map_err(py_err)?;
    Ok((c.numer().to_string(), c.denom().to_string()))
}

#[pyfunction]
fn qe_constant(tree_text: &str, clopen: Vec<usize>) -> PyResult<u32> {
    let t = BoundedTree::from_ball(&parse_tree(tree_text).map_err(py_err)?).map_err(py_err)?;
    let qe = QuasiEdge::new(&t, clopen).map_err(py_err)?;
    constant_of(&t, &qe).map_err(py_err)
}

#[pymodule]
fn pyquasitree(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(run_cli, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(injection_index, m)?)?;
    m.add_function(wrap_pyfunction!(cross_ratio, m)?)?;
    m.add_function(wrap_pyfunction!(qe_constant, m)?)?;
    Ok(())
}

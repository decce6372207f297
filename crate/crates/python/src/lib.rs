//! Python module `fct`: graphs, dimension reports, generator sets and the oracle.
//!
//! Reports cross the boundary as JSON strings so the Python side sees the same
//! schema as the command line.

use fct_core::dimension::{bounds_report, dimension_report, model_dimension, upper_bound};
use fct_core::invariants::{
    one_factor_groebner, two_factor_groebner, GeneratorSet, InvariantsError, OneFactorSplit,
};
use fct_core::oracle::{vanishing_basis, verify_vanishes, OracleError, VanishingBasisRequest};
use fct_core::{FactorGraph, Polynomial};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn value_error(e: impl ToString) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn oracle_error(e: OracleError) -> PyErr {
    match e {
        OracleError::CapExceeded { .. } | OracleError::LiftFailed { .. } => {
            PyRuntimeError::new_err(e.to_string())
        }
        other => value_error(other),
    }
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("reports serialize")
}

/// Factor analysis graph with edges from latent to observed nodes.
#[pyclass(name = "Graph", frozen)]
pub struct PyGraph {
    inner: FactorGraph,
}

#[pymethods]
impl PyGraph {
    #[new]
    fn new(
        observed: Vec<String>,
        latent: Vec<String>,
        edges: Vec<(String, String)>,
    ) -> PyResult<Self> {
        let inner = FactorGraph::new(&observed, &latent, &edges).map_err(value_error)?;
        Ok(PyGraph { inner })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inner = FactorGraph::from_json(text).map_err(value_error)?;
        Ok(PyGraph { inner })
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    #[getter]
    fn p(&self) -> usize {
        self.inner.p()
    }

    #[getter]
    fn m(&self) -> usize {
        self.inner.m()
    }

    #[getter]
    fn warnings(&self) -> Vec<String> {
        self.inner.warnings().to_vec()
    }

    fn __repr__(&self) -> String {
        format!(
            "Graph(p={}, m={}, edges={})",
            self.inner.p(),
            self.inner.m(),
            self.inner.num_edges()
        )
    }
}

/// Generic rank of the Jacobian over `trials` random loadings.
#[pyfunction]
#[pyo3(name = "model_dimension", signature = (graph, trials = 3, seed = 0))]
fn py_model_dimension(graph: &PyGraph, trials: usize, seed: u64) -> usize {
    model_dimension(&graph.inner, trials.max(1), seed)
}

#[pyfunction]
#[pyo3(name = "upper_bound")]
fn py_upper_bound(graph: &PyGraph) -> usize {
    upper_bound(&graph.inner)
}

/// Full dimension report as JSON.
#[pyfunction]
#[pyo3(name = "dimension_report", signature = (graph, trials = 3, seed = 0, labeling_budget = 10_000))]
fn py_dimension_report(
    graph: &PyGraph,
    trials: usize,
    seed: u64,
    labeling_budget: usize,
) -> String {
    to_json(&dimension_report(
        &graph.inner,
        trials,
        seed,
        labeling_budget,
    ))
}

/// Bounds report as JSON; skips the Jacobian.
#[pyfunction]
#[pyo3(name = "bounds_report", signature = (graph, labeling_budget = 10_000))]
fn py_bounds_report(graph: &PyGraph, labeling_budget: usize) -> String {
    to_json(&bounds_report(&graph.inner, labeling_budget))
}

fn generator_set(g: &FactorGraph) -> Result<GeneratorSet, InvariantsError> {
    if g.m() == 1 {
        return Ok(one_factor_groebner(&OneFactorSplit::complement_of(
            g.children(0),
            g.p(),
        )?));
    }
    two_factor_groebner(g)
}

/// Generator set as JSON `{"monomials": [...], "tetrads": [...], "hexads": [...]}`.
#[pyfunction]
#[pyo3(name = "invariants")]
fn py_invariants(graph: &PyGraph) -> PyResult<String> {
    generator_set(&graph.inner)
        .map(|s| s.to_json())
        .map_err(value_error)
}

/// Whether the polynomial, in `s_i_j` notation, vanishes on the model.
#[pyfunction]
#[pyo3(name = "verify_vanishes")]
fn py_verify_vanishes(polynomial: &str, graph: &PyGraph) -> PyResult<bool> {
    let f: Polynomial = polynomial.parse().map_err(value_error)?;
    verify_vanishes(&f, &graph.inner).map_err(oracle_error)
}

/// Certified vanishing polynomials up to `degree`, as text.
#[pyfunction]
#[pyo3(name = "vanishing_basis", signature = (graph, degree, homogeneous = false, cap = 50_000, seed = 0))]
fn py_vanishing_basis(
    graph: &PyGraph,
    degree: u32,
    homogeneous: bool,
    cap: usize,
    seed: u64,
) -> PyResult<Vec<String>> {
    let req = VanishingBasisRequest::new(&graph.inner, degree)
        .homogeneous_only(homogeneous)
        .cap(cap)
        .seed(seed);
    let basis = vanishing_basis(&req).map_err(oracle_error)?;
    Ok(basis.iter().map(ToString::to_string).collect())
}

#[pymodule]
fn fct(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGraph>()?;
    m.add_function(wrap_pyfunction!(py_model_dimension, m)?)?;
    m.add_function(wrap_pyfunction!(py_upper_bound, m)?)?;
    m.add_function(wrap_pyfunction!(py_dimension_report, m)?)?;
    m.add_function(wrap_pyfunction!(py_bounds_report, m)?)?;
    m.add_function(wrap_pyfunction!(py_invariants, m)?)?;
    m.add_function(wrap_pyfunction!(py_verify_vanishes, m)?)?;
    m.add_function(wrap_pyfunction!(py_vanishing_basis, m)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_latent_node_uses_the_one_factor_basis() {
        let g = FactorGraph::from_children(5, &[&[1, 2, 3, 4]]);
        let set = generator_set(&g).unwrap();
        assert_eq!((set.monomials.len(), set.tetrads.len()), (4, 2));
        let three = FactorGraph::from_children(3, &[&[1], &[2], &[3]]);
        assert_eq!(
            generator_set(&three).unwrap_err(),
            InvariantsError::NotTwoFactor(3)
        );
    }
}

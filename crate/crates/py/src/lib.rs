//! Python bindings. Vertex ids are 0-based, coordinates cross the boundary
//! as strings (`"p/q"` or decimals) so exact values survive.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use knn_realize::approx::{embed as embed_graph, Budget, EmbedOptions, EmbedStatus};
use knn_realize::gen::{gen_points as gen_point_set, random_regular_digraph as random_digraph, Distribution};
use knn_realize::io::{emit_graph, parse_graph};
use knn_realize::lambda::{lambda_acyclic, LambdaOutcome};
use knn_realize::line::{decide_1d as decide, realize_1d as realize, Outcome1d};
use knn_realize::points::{format_rational, parse_rational, PointSet};
use knn_realize::{
    knn_graph as build_knn, sigma_score as score, verify_realization, DirectedGraph, Provenance, Realization,
};

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// A k-regular digraph on vertices `0..n`.
#[pyclass(name = "Graph", frozen)]
struct PyGraph {
    inner: DirectedGraph,
}

#[pymethods]
impl PyGraph {
    #[new]
    fn new(n: usize, k: usize, edges: Vec<(usize, usize)>) -> PyResult<Self> {
        let inner = DirectedGraph::new(n, k, edges).map_err(value_error)?;
        Ok(Self { inner })
    }

    /// Parses the 1-based text format `n k` followed by `u v` lines.
    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        let inner = parse_graph(text).map_err(value_error)?;
        Ok(Self { inner })
    }

    fn to_text(&self) -> String {
        emit_graph(&self.inner)
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn k(&self) -> usize {
        self.inner.k()
    }

    fn edges(&self) -> Vec<(usize, usize)> {
        self.inner.edges().collect()
    }

    fn out_neighbors(&self, v: usize) -> PyResult<Vec<usize>> {
        if v >= self.inner.n() {
            return Err(value_error(format!("vertex {v} out of range")));
        }
        Ok(self.inner.out_neighbors(v).to_vec())
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!("Graph(n={}, k={})", self.inner.n(), self.inner.k())
    }
}

fn point_set(points: &[Vec<String>]) -> PyResult<PointSet> {
    let d = points.first().map_or(1, Vec::len);
    let rows = points
        .iter()
        .map(|p| p.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(value_error)?;
    PointSet::exact(d, rows).map_err(value_error)
}

fn coordinates(points: &PointSet) -> Vec<Vec<String>> {
    (0..points.len())
        .map(|i| match points.exact_point(i) {
            Some(p) => p.iter().map(format_rational).collect(),
            None => points.point_f64(i).iter().map(f64::to_string).collect(),
        })
        .collect()
}

fn realization(points: &[Vec<String>]) -> PyResult<Realization> {
    Ok(Realization::identity(point_set(points)?, Provenance::UserSupplied))
}

/// Exact integer points; `dist` is uniform-box, gaussian or
/// line-distinct-gaps.
#[pyfunction]
#[pyo3(signature = (n, d, seed, dist = "line-distinct-gaps"))]
fn gen_points(n: usize, d: usize, seed: u64, dist: &str) -> PyResult<Vec<Vec<String>>> {
    if d == 0 {
        return Err(value_error("dimension must be positive"));
    }
    let dist: Distribution = dist.parse().map_err(value_error)?;
    Ok(coordinates(&gen_point_set(n, d, seed, dist)))
}

#[pyfunction]
fn random_regular_digraph(n: usize, k: usize, seed: u64) -> PyResult<PyGraph> {
    if n <= k {
        return Err(value_error("need n > k"));
    }
    Ok(PyGraph {
        inner: random_digraph(n, k, seed),
    })
}

#[pyfunction]
fn knn_graph(points: Vec<Vec<String>>, k: usize) -> PyResult<PyGraph> {
    let inner = build_knn(&point_set(&points)?, k).map_err(value_error)?;
    Ok(PyGraph { inner })
}

/// Returns a dict with `realizable`, `ops` and, when realizable,
/// `ordering` and `window_start`.
#[pyfunction]
fn decide_1d<'py>(py: Python<'py>, g: &PyGraph) -> PyResult<Bound<'py, PyDict>> {
    let decision = decide(&g.inner);
    let out = PyDict::new(py);
    out.set_item("realizable", decision.is_realizable())?;
    out.set_item("ops", decision.ops)?;
    if let Outcome1d::Realizable { ordering, window_start } = &decision.outcome {
        out.set_item("ordering", ordering.as_slice().to_vec())?;
        out.set_item("window_start", window_start.clone())?;
    }
    Ok(out)
}

/// Exact line coordinates, one per vertex; raises ValueError when the graph
/// is not a kNN graph on the line.
#[pyfunction]
fn realize_1d(g: &PyGraph) -> PyResult<Vec<String>> {
    let r = realize(&g.inner).map_err(value_error)?;
    Ok(coordinates(&r.realization.points)
        .into_iter()
        .map(|mut p| p.remove(0))
        .collect())
}

/// `None` when the pair-order graph is acyclic, otherwise a cycle of
/// vertex pairs.
#[pyfunction]
fn lambda_check(g: &PyGraph) -> PyResult<Option<Vec<(usize, usize)>>> {
    match lambda_acyclic(&g.inner).map_err(value_error)? {
        LambdaOutcome::Realizable(_) => Ok(None),
        LambdaOutcome::NotRealizable(cycle) => Ok(Some(cycle.iter().map(|p| (p.0, p.1)).collect())),
    }
}

/// `(preserved_edges, total_edges)` for a placement given as coordinate
/// strings.
#[pyfunction]
fn sigma_score(g: &PyGraph, points: Vec<Vec<String>>) -> PyResult<(usize, usize)> {
    let s = score(&g.inner, &realization(&points)?).map_err(value_error)?;
    Ok((s.preserved_edges, s.total_edges))
}

#[pyfunction]
fn verify(g: &PyGraph, points: Vec<Vec<String>>) -> PyResult<bool> {
    verify_realization(&g.inner, &realization(&points)?).map_err(value_error)
}

/// Returns a dict with `status`, and when every component was solved
/// `score` (a fraction string), `points` and `removed_fraction`.
#[pyfunction]
#[pyo3(signature = (g, dim, eps, seed = 0, size_cap = None, restarts = None))]
fn embed<'py>(
    py: Python<'py>,
    g: &PyGraph,
    dim: usize,
    eps: f64,
    seed: u64,
    size_cap: Option<usize>,
    restarts: Option<usize>,
) -> PyResult<Bound<'py, PyDict>> {
    if !(eps > 0.0 && eps <= 1.0) || dim == 0 {
        return Err(value_error("need 0 < eps <= 1 and dim > 0"));
    }
    let mut budget = Budget::default();
    if let Some(r) = restarts {
        budget.restarts = r;
    }
    let options = EmbedOptions { size_cap, budget, seed };
    let result = py.detach(|| embed_graph(&g.inner, dim, eps, &options));
    let out = PyDict::new(py);
    out.set_item("status", result.status.name())?;
    out.set_item("success", result.status == EmbedStatus::Success)?;
    if let Some(s) = &result.score {
        out.set_item("score", s.fraction.to_string())?;
    }
    if let Some(r) = &result.realization {
        out.set_item("points", coordinates(&r.points))?;
    }
    if let Some(c) = &result.cut {
        out.set_item("removed_fraction", c.removed_fraction.to_string())?;
        out.set_item("components", c.components.component_count())?;
    }
    Ok(out)
}

#[pymodule]
pub fn knn_realize_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGraph>()?;
    m.add_function(wrap_pyfunction!(gen_points, m)?)?;
    m.add_function(wrap_pyfunction!(random_regular_digraph, m)?)?;
    m.add_function(wrap_pyfunction!(knn_graph, m)?)?;
    m.add_function(wrap_pyfunction!(decide_1d, m)?)?;
    m.add_function(wrap_pyfunction!(realize_1d, m)?)?;
    m.add_function(wrap_pyfunction!(lambda_check, m)?)?;
    m.add_function(wrap_pyfunction!(sigma_score, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(embed, m)?)?;
    Ok(())
}

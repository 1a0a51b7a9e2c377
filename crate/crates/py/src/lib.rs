//! Python bindings. The module is importable as `qcminer`.

use std::collections::BTreeMap;
use std::io::BufReader;
use std::path::PathBuf;
use std::time::Duration;

use pyo3::exceptions::{PyIOError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use qcminer::graph::{k_core, load_graph, LoadStats, LoadedGraph, VertexId};
use qcminer::oracle::maximal_quasicliques as oracle_maximal;
use qcminer::postprocess::maximality_filter as trie_filter;
use qcminer::pruning::is_quasi_clique as check_quasi_clique;
use qcminer::{EngineConfig, Gamma, GraphFormat, MiningParams, Mode};

type Stats = BTreeMap<String, f64>;

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Accepts `"p/q"`, a decimal string, or a float (read through its repr).
fn gamma_from(obj: &Bound<'_, PyAny>) -> PyResult<Gamma> {
    let text = match obj.extract::<String>() {
        Ok(s) => s,
        Err(_) => obj.str()?.to_string(),
    };
    text.parse().map_err(value_error)
}

/// An undirected simple graph. Vertex ids in results are the ids the graph
/// was built or loaded with.
#[pyclass(name = "Graph", module = "qcminer", frozen)]
struct PyGraph {
    inner: LoadedGraph,
}

#[pymethods]
impl PyGraph {
    /// Builds a graph on `0..n` from `(u, v)` pairs. Self-loops and
    /// duplicates are dropped.
    #[new]
    fn new(n: usize, edges: Vec<(VertexId, VertexId)>) -> PyResult<Self> {
        if let Some(&(u, v)) = edges.iter().find(|(u, v)| *u as usize >= n || *v as usize >= n) {
            return Err(PyValueError::new_err(format!("edge ({u}, {v}) outside 0..{n}")));
        }
        let inner = LoadedGraph {
            graph: qcminer::Graph::from_edges(n, edges).0,
            original_ids: (0..n as u64).collect(),
            stats: LoadStats::default(),
        };
        Ok(PyGraph { inner })
    }

    /// Reads an edge list (`"edge"`) or adjacency list (`"adj"`) file.
    #[staticmethod]
    #[pyo3(signature = (path, format = "edge"))]
    fn load(path: PathBuf, format: &str) -> PyResult<Self> {
        let format = match format {
            "edge" => GraphFormat::EdgeList,
            "adj" => GraphFormat::Adjacency,
            other => return Err(PyValueError::new_err(format!("unknown format {other:?}"))),
        };
        let file =
            std::fs::File::open(&path).map_err(|e| PyIOError::new_err(format!("{}: {e}", path.display())))?;
        let inner = load_graph(BufReader::new(file), format).map_err(value_error)?;
        Ok(PyGraph { inner })
    }

    #[getter]
    fn vertex_count(&self) -> usize {
        self.inner.graph.vertex_count()
    }

    #[getter]
    fn edge_count(&self) -> usize {
        self.inner.graph.edge_count()
    }

    /// Input ids of the dense vertices `0..vertex_count`.
    #[getter]
    fn ids(&self) -> Vec<u64> {
        self.inner.original_ids.clone()
    }

    /// Neighbors of dense vertex `v`.
    fn neighbors(&self, v: VertexId) -> PyResult<Vec<VertexId>> {
        if v as usize >= self.inner.graph.vertex_count() {
            return Err(PyValueError::new_err(format!("vertex {v} out of range")));
        }
        Ok(self.inner.graph.neighbors(v).to_vec())
    }

    fn edges(&self) -> Vec<(VertexId, VertexId)> {
        self.inner.graph.edges().collect()
    }

    /// Input ids of the vertices that survive in the `k`-core.
    fn k_core(&self, k: usize) -> Vec<u64> {
        k_core(&self.inner.graph, k).ids.iter().map(|&v| self.inner.original_ids[v as usize]).collect()
    }

    fn __repr__(&self) -> String {
        format!("Graph(vertices={}, edges={})", self.vertex_count(), self.edge_count())
    }
}

/// Degree ratio and minimum result size.
#[pyclass(name = "MiningParams", module = "qcminer", frozen)]
struct PyMiningParams {
    inner: MiningParams,
}

#[pymethods]
impl PyMiningParams {
    #[new]
    fn new(gamma: &Bound<'_, PyAny>, min_size: usize) -> PyResult<Self> {
        let inner = MiningParams::new(gamma_from(gamma)?, min_size).map_err(value_error)?;
        Ok(PyMiningParams { inner })
    }

    /// Exact ratio as `"p/q"`.
    #[getter]
    fn gamma(&self) -> String {
        self.inner.gamma().to_string()
    }

    #[getter]
    fn min_size(&self) -> usize {
        self.inner.tau_size()
    }

    /// Minimum degree of any vertex in a result.
    #[getter]
    fn k(&self) -> usize {
        self.inner.k()
    }

    fn __repr__(&self) -> String {
        format!("MiningParams(gamma='{}', min_size={})", self.gamma(), self.min_size())
    }
}

/// Scheduling settings of the parallel engine.
#[pyclass(name = "EngineConfig", module = "qcminer", frozen)]
struct PyEngineConfig {
    inner: EngineConfig,
}

#[pymethods]
impl PyEngineConfig {
    #[new]
    #[pyo3(signature = (mode = "time", tau_split = 50, tau_time = 5.0, workers = 1, batch_size = 128, queue_cap = 1024, spill_dir = None))]
    fn new(
        mode: &str,
        tau_split: usize,
        tau_time: f64,
        workers: usize,
        batch_size: usize,
        queue_cap: usize,
        spill_dir: Option<PathBuf>,
    ) -> PyResult<Self> {
        let mode: Mode = mode.parse().map_err(value_error)?;
        let tau_time = Duration::try_from_secs_f64(tau_time).map_err(value_error)?;
        let inner = EngineConfig {
            mode,
            tau_split,
            tau_time,
            workers,
            batch: batch_size,
            queue_capacity: queue_cap,
            spill_dir,
        };
        inner.validate().map_err(value_error)?;
        Ok(PyEngineConfig { inner })
    }

    #[getter]
    fn mode(&self) -> String {
        self.inner.mode.to_string()
    }

    #[getter]
    fn workers(&self) -> usize {
        self.inner.workers
    }

    #[getter]
    fn tau_split(&self) -> usize {
        self.inner.tau_split
    }

    #[getter]
    fn tau_time(&self) -> f64 {
        self.inner.tau_time.as_secs_f64()
    }

    fn __repr__(&self) -> String {
        format!(
            "EngineConfig(mode='{}', tau_split={}, tau_time={}, workers={})",
            self.mode(),
            self.inner.tau_split,
            self.tau_time(),
            self.inner.workers
        )
    }
}

/// Mines all maximal quasi-cliques of `graph`. Returns the result sets in
/// input ids, largest first, and the run statistics as a dict.
#[pyfunction]
#[pyo3(signature = (graph, params, config = None, recode = true))]
fn mine(
    py: Python<'_>,
    graph: &PyGraph,
    params: &PyMiningParams,
    config: Option<&PyEngineConfig>,
    recode: bool,
) -> PyResult<(Vec<Vec<u64>>, Stats)> {
    let config = config.map(|c| c.inner.clone()).unwrap_or_default();
    let params = params.inner;
    let outcome = py
        .detach(|| qcminer::mine(&graph.inner, params, &config, recode))
        .map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    let stats = outcome
        .stats
        .report()
        .lines()
        .filter_map(|line| {
            let (key, value) = line.split_once(' ')?;
            Some((key.to_string(), value.trim().parse().ok()?))
        })
        .collect();
    Ok((outcome.results, stats))
}

/// Exhaustive reference enumeration for graphs of at most 20 vertices.
/// Uses dense vertex ids.
#[pyfunction]
fn maximal_quasicliques(
    graph: &PyGraph,
    gamma: &Bound<'_, PyAny>,
    min_size: usize,
) -> PyResult<Vec<Vec<VertexId>>> {
    oracle_maximal(&graph.inner.graph, gamma_from(gamma)?, min_size).map_err(value_error)
}

/// True when the dense vertices `vertices` induce a quasi-clique.
#[pyfunction]
fn is_quasi_clique(graph: &PyGraph, vertices: Vec<VertexId>, gamma: &Bound<'_, PyAny>) -> PyResult<bool> {
    let n = graph.inner.graph.vertex_count();
    if let Some(v) = vertices.iter().find(|&&v| v as usize >= n) {
        return Err(PyValueError::new_err(format!("vertex {v} out of range")));
    }
    let mut set = vertices;
    set.sort_unstable();
    set.dedup();
    Ok(check_quasi_clique(&graph.inner.graph, &set, gamma_from(gamma)?))
}

/// Keeps the sets that are not contained in another set.
#[pyfunction]
fn maximality_filter(sets: Vec<Vec<VertexId>>) -> Vec<Vec<VertexId>> {
    trie_filter(&sets)
}

/// Module initializer, also usable with `append_to_inittab!` when embedding.
#[pymodule]
#[pyo3(name = "qcminer")]
pub fn qcminer_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGraph>()?;
    m.add_class::<PyMiningParams>()?;
    m.add_class::<PyEngineConfig>()?;
    m.add_function(wrap_pyfunction!(mine, m)?)?;
    m.add_function(wrap_pyfunction!(maximal_quasicliques, m)?)?;
    m.add_function(wrap_pyfunction!(is_quasi_clique, m)?)?;
    m.add_function(wrap_pyfunction!(maximality_filter, m)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use pyo3::types::{PyFloat, PyString};

    #[test]
    fn gamma_accepts_strings_and_floats() {
        Python::initialize();
        Python::attach(|py| {
            let exact = gamma_from(PyString::new(py, "89/100").as_any()).unwrap();
            assert_eq!(gamma_from(PyFloat::new(py, 0.89).as_any()).unwrap(), exact);
            assert_eq!(gamma_from(PyString::new(py, "0.89").as_any()).unwrap(), exact);
            assert!(gamma_from(PyString::new(py, "x").as_any()).is_err());
        });
    }
}

//! Python bindings for `testorder`.
//!
//! Matrices, orderings and statistics summaries are exposed as frozen
//! classes; strategies, metrics and the synthetic generator as functions.
//! Long-running calls release the GIL.

use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;

use testorder::coverage::{parse_coverage, parse_kill, write_coverage, write_kill};
use testorder::harness::{self, ExperimentPlan, SynthSpec};
use testorder::stats::{self, DEFAULT_ALPHA};
use testorder::{CoverageMatrix, Error, KillMatrix, MatrixFormat, Ordering, StatSummary, StrategyConfig, StrategyId};

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Io { .. } => PyIOError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn parse_format(format: &str) -> PyResult<MatrixFormat> {
    format.parse().map_err(py_err)
}

fn parse_strategy(name: &str) -> PyResult<StrategyId> {
    name.parse().map_err(py_err)
}

fn render(write: impl FnOnce(&mut Vec<u8>) -> std::io::Result<()>) -> PyResult<String> {
    let mut buf = Vec::new();
    write(&mut buf).map_err(|e| PyIOError::new_err(e.to_string()))?;
    String::from_utf8(buf).map_err(|e| PyValueError::new_err(e.to_string()))
}

#[pyclass(name = "CoverageMatrix", module = "testorder", frozen)]
struct PyCoverageMatrix {
    inner: CoverageMatrix,
}

#[pymethods]
impl PyCoverageMatrix {
    /// `covers[i]` lists the unit indices test `names[i]` covers.
    #[new]
    fn new(names: Vec<String>, units: usize, covers: Vec<Vec<usize>>) -> PyResult<Self> {
        let inner = CoverageMatrix::new(names, units, covers).map_err(py_err)?;
        Ok(PyCoverageMatrix { inner })
    }

    #[staticmethod]
    #[pyo3(signature = (text, format = "tsv"))]
    fn parse(text: &str, format: &str) -> PyResult<Self> {
        let inner = parse_coverage(text.as_bytes(), parse_format(format)?).map_err(py_err)?;
        Ok(PyCoverageMatrix { inner })
    }

    #[staticmethod]
    #[pyo3(signature = (path, format = "tsv"))]
    fn load(path: std::path::PathBuf, format: &str) -> PyResult<Self> {
        let inner = harness::load_coverage(&path, parse_format(format)?).map_err(py_err)?;
        Ok(PyCoverageMatrix { inner })
    }

    #[pyo3(signature = (format = "tsv"))]
    fn dumps(&self, format: &str) -> PyResult<String> {
        let format = parse_format(format)?;
        render(|buf| write_coverage(buf, &self.inner, format))
    }

    #[getter]
    fn test_names(&self) -> Vec<String> {
        self.inner.test_names().to_vec()
    }

    #[getter]
    fn test_count(&self) -> usize {
        self.inner.test_count()
    }

    #[getter]
    fn unit_count(&self) -> usize {
        self.inner.unit_count()
    }

    /// Units covered by test `test`, ascending.
    fn covered_units(&self, test: usize) -> PyResult<Vec<usize>> {
        if test >= self.inner.test_count() {
            return Err(PyValueError::new_err(format!("test index {test} out of range")));
        }
        Ok(self.inner.row(test).ones().collect())
    }

    fn __len__(&self) -> usize {
        self.inner.test_count()
    }

    fn __repr__(&self) -> String {
        format!("CoverageMatrix(tests={}, units={})", self.inner.test_count(), self.inner.unit_count())
    }
}

#[pyclass(name = "KillMatrix", module = "testorder", frozen)]
struct PyKillMatrix {
    inner: KillMatrix,
}

#[pymethods]
impl PyKillMatrix {
    #[new]
    fn new(names: Vec<String>, faults: usize, kills: Vec<Vec<usize>>) -> PyResult<Self> {
        let inner = KillMatrix::new(names, faults, kills).map_err(py_err)?;
        Ok(PyKillMatrix { inner })
    }

    #[staticmethod]
    #[pyo3(signature = (text, format = "tsv"))]
    fn parse(text: &str, format: &str) -> PyResult<Self> {
        let inner = parse_kill(text.as_bytes(), parse_format(format)?).map_err(py_err)?;
        Ok(PyKillMatrix { inner })
    }

    #[staticmethod]
    #[pyo3(signature = (path, format = "tsv"))]
    fn load(path: std::path::PathBuf, format: &str) -> PyResult<Self> {
        let inner = harness::load_kill(&path, parse_format(format)?).map_err(py_err)?;
        Ok(PyKillMatrix { inner })
    }

    #[pyo3(signature = (format = "tsv"))]
    fn dumps(&self, format: &str) -> PyResult<String> {
        let format = parse_format(format)?;
        render(|buf| write_kill(buf, &self.inner, format))
    }

    #[getter]
    fn test_names(&self) -> Vec<String> {
        self.inner.test_names().to_vec()
    }

    #[getter]
    fn fault_count(&self) -> usize {
        self.inner.fault_count()
    }

    /// Tests that kill fault `fault`.
    fn killers(&self, fault: usize) -> PyResult<Vec<usize>> {
        if fault >= self.inner.fault_count() {
            return Err(PyValueError::new_err(format!("fault index {fault} out of range")));
        }
        Ok(self.inner.killers(fault))
    }

    fn __repr__(&self) -> String {
        format!("KillMatrix(tests={}, faults={})", self.inner.test_count(), self.inner.fault_count())
    }
}

#[pyclass(name = "Ordering", module = "testorder", frozen)]
struct PyOrdering {
    inner: Ordering,
}

#[pymethods]
impl PyOrdering {
    #[staticmethod]
    fn from_json(line: &str) -> PyResult<Self> {
        let inner = Ordering::from_json_line(line).map_err(py_err)?;
        Ok(PyOrdering { inner })
    }

    fn to_json(&self) -> String {
        self.inner.to_json_line()
    }

    #[getter]
    fn strategy(&self) -> &'static str {
        self.inner.strategy.as_str()
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.inner.seed
    }

    #[getter]
    fn permutation(&self) -> Vec<usize> {
        self.inner.permutation.clone()
    }

    #[getter]
    fn recompute_count(&self) -> u64 {
        self.inner.instrumentation.recompute_count
    }

    #[getter]
    fn tie_count(&self) -> u64 {
        self.inner.instrumentation.tie_count
    }

    #[getter]
    fn restart_count(&self) -> u64 {
        self.inner.instrumentation.restart_count
    }

    #[getter]
    fn elapsed_ns(&self) -> u64 {
        self.inner.instrumentation.elapsed_ns
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!("Ordering(strategy={:?}, seed={}, permutation={:?})", self.strategy(), self.inner.seed, self.inner.permutation)
    }
}

#[pyclass(name = "StatSummary", module = "testorder", frozen)]
struct PyStatSummary {
    inner: StatSummary,
}

#[pymethods]
impl PyStatSummary {
    #[getter]
    fn p_value(&self) -> f64 {
        self.inner.p_value
    }

    #[getter]
    fn a12(&self) -> f64 {
        self.inner.a12
    }

    /// `"BETTER"`, `"WORSE"` or `"NODIFF"`.
    #[getter]
    fn verdict(&self) -> &'static str {
        self.inner.verdict.symbol()
    }

    #[getter]
    fn alpha(&self) -> f64 {
        self.inner.alpha
    }

    fn cell(&self) -> String {
        self.inner.cell()
    }

    fn __repr__(&self) -> String {
        format!(
            "StatSummary(p_value={}, a12={}, verdict={:?})",
            self.inner.p_value,
            self.inner.a12,
            self.verdict()
        )
    }
}

fn build_config(
    unified_ratio: Option<f64>,
    art_candidates: Option<usize>,
    ga_population: Option<usize>,
    ga_generations: Option<usize>,
) -> StrategyConfig {
    let mut config = StrategyConfig::default();
    if let Some(r) = unified_ratio {
        config.unified_ratio = r;
    }
    if let Some(k) = art_candidates {
        config.art_candidate_size = k;
    }
    if let Some(p) = ga_population {
        config.ga.population = p;
    }
    if let Some(g) = ga_generations {
        config.ga.generations = g;
    }
    config
}

/// Names of the available strategies.
#[pyfunction]
fn strategies() -> Vec<&'static str> {
    StrategyId::ALL.iter().map(|s| s.as_str()).collect()
}

#[pyfunction]
#[pyo3(signature = (matrix, strategy, seed = 0, *, unified_ratio = None, art_candidates = None, ga_population = None, ga_generations = None))]
#[allow(clippy::too_many_arguments)]
fn run_strategy(
    py: Python<'_>,
    matrix: &PyCoverageMatrix,
    strategy: &str,
    seed: u64,
    unified_ratio: Option<f64>,
    art_candidates: Option<usize>,
    ga_population: Option<usize>,
    ga_generations: Option<usize>,
) -> PyResult<PyOrdering> {
    let id = parse_strategy(strategy)?;
    let config = build_config(unified_ratio, art_candidates, ga_population, ga_generations);
    let inner = py
        .detach(|| testorder::run_strategy(id, &matrix.inner, &config, seed))
        .map_err(py_err)?;
    Ok(PyOrdering { inner })
}

/// Runs each strategy `repeats` times in parallel with per-run seeds derived
/// from `seed`, as the command line tool does.
#[pyfunction]
#[pyo3(signature = (matrix, strategies = None, repeats = 1, seed = 0, *, unified_ratio = None, art_candidates = None, ga_population = None, ga_generations = None))]
#[allow(clippy::too_many_arguments)]
fn prioritize(
    py: Python<'_>,
    matrix: &PyCoverageMatrix,
    strategies: Option<Vec<String>>,
    repeats: usize,
    seed: u64,
    unified_ratio: Option<f64>,
    art_candidates: Option<usize>,
    ga_population: Option<usize>,
    ga_generations: Option<usize>,
) -> PyResult<Vec<PyOrdering>> {
    let mut plan = ExperimentPlan::new("<memory>");
    if let Some(names) = strategies {
        plan.strategies = names.iter().map(|n| parse_strategy(n)).collect::<PyResult<_>>()?;
    }
    plan.repeats = repeats;
    plan.base_seed = seed;
    plan.config = build_config(unified_ratio, art_candidates, ga_population, ga_generations);
    let orderings = py
        .detach(|| harness::prioritize_matrix(&matrix.inner, &plan))
        .map_err(py_err)?;
    Ok(orderings.into_iter().map(|inner| PyOrdering { inner }).collect())
}

#[pyfunction]
fn apfd(ordering: &PyOrdering, kills: &PyKillMatrix) -> PyResult<f64> {
    testorder::apfd(&ordering.inner, &kills.inner).map(|r| r.apfd).map_err(py_err)
}

#[pyfunction]
fn apsc(ordering: &PyOrdering, matrix: &PyCoverageMatrix) -> PyResult<f64> {
    testorder::apsc(&ordering.inner, &matrix.inner).map_err(py_err)
}

/// Two-sided Mann-Whitney U p-value.
#[pyfunction]
fn mann_whitney_u(a: Vec<f64>, b: Vec<f64>) -> PyResult<f64> {
    stats::mann_whitney_u(&a, &b).map_err(py_err)
}

#[pyfunction]
fn vargha_delaney_a12(a: Vec<f64>, b: Vec<f64>) -> PyResult<f64> {
    stats::vargha_delaney_a12(&a, &b).map_err(py_err)
}

/// Compares sample `a` against `b`; `BETTER` means `a` tends to be larger.
#[pyfunction]
#[pyo3(signature = (a, b, alpha = DEFAULT_ALPHA))]
fn compare(a: Vec<f64>, b: Vec<f64>, alpha: f64) -> PyResult<PyStatSummary> {
    let inner = stats::compare_samples(&a, &b, alpha).map_err(py_err)?;
    Ok(PyStatSummary { inner })
}

/// Random coverage and kill matrices for experiments.
#[pyfunction]
#[pyo3(signature = (tests, units, density, faults, seed = 0, coupling = 0.5))]
fn synthesize(
    py: Python<'_>,
    tests: usize,
    units: usize,
    density: f64,
    faults: usize,
    seed: u64,
    coupling: f64,
) -> PyResult<(PyCoverageMatrix, PyKillMatrix)> {
    let mut spec = SynthSpec::new(tests, units, density, faults, seed);
    spec.fault_coupling = coupling;
    let (cov, kill) = py.detach(|| harness::synthesize(&spec)).map_err(py_err)?;
    Ok((PyCoverageMatrix { inner: cov }, PyKillMatrix { inner: kill }))
}

#[pymodule]
#[pyo3(name = "testorder")]
fn testorder_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyCoverageMatrix>()?;
    m.add_class::<PyKillMatrix>()?;
    m.add_class::<PyOrdering>()?;
    m.add_class::<PyStatSummary>()?;
    m.add_function(wrap_pyfunction!(strategies, m)?)?;
    m.add_function(wrap_pyfunction!(run_strategy, m)?)?;
    m.add_function(wrap_pyfunction!(prioritize, m)?)?;
    m.add_function(wrap_pyfunction!(apfd, m)?)?;
    m.add_function(wrap_pyfunction!(apsc, m)?)?;
    m.add_function(wrap_pyfunction!(mann_whitney_u, m)?)?;
    m.add_function(wrap_pyfunction!(vargha_delaney_a12, m)?)?;
    m.add_function(wrap_pyfunction!(compare, m)?)?;
    m.add_function(wrap_pyfunction!(synthesize, m)?)?;
    Ok(())
}

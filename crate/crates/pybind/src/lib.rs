//! Python bindings: parse BioAmbients processes, step them, explore state
//! spaces, run the contents/bindings analysis, and check it against execution.

use bioamb::ast::{alpha_equal, AmbientId};
use bioamb::cfa;
use bioamb::output;
use bioamb::semantics::{explore, normalize, step, DEFAULT_MAX_DEPTH, DEFAULT_MAX_STATES};
use bioamb::verify;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use std::collections::BTreeMap;

/// A parsed process term.
#[pyclass]
pub struct Process {
    inner: bioamb::ast::Process,
}

/// Rendered name maps of one analysis run.
#[pyclass]
pub struct Analysis {
    #[pyo3(get)]
    top: String,
    #[pyo3(get)]
    contents: BTreeMap<String, Vec<String>>,
    #[pyo3(get)]
    bindings: BTreeMap<String, Vec<String>>,
    #[pyo3(get)]
    constraints: usize,
    #[pyo3(get)]
    iterations: usize,
}

/// A bounded reachable-state exploration.
#[pyclass]
pub struct Space {
    #[pyo3(get)]
    states: Vec<String>,
    #[pyo3(get)]
    edges: Vec<(usize, String, usize)>,
    #[pyo3(get)]
    depth_reached: usize,
    #[pyo3(get)]
    truncated: bool,
}

/// The outcome of checking an analysis against every reachable state.
#[pyclass]
pub struct Report {
    #[pyo3(get)]
    ok: bool,
    #[pyo3(get)]
    states_checked: usize,
    #[pyo3(get)]
    violations: Vec<(usize, String, String)>,
    #[pyo3(get)]
    spurious: Vec<(String, String)>,
    #[pyo3(get)]
    missed: Vec<(String, String)>,
    #[pyo3(get)]
    truncated: bool,
}

fn analysis_data(p: &bioamb::ast::Process) -> Result<Analysis, String> {
    let result = cfa::analyze(p).map_err(|e| e.to_string())?;
    let value = output::analysis_json(&result, p);
    let string_map = |v: &serde_json::Value| -> BTreeMap<String, Vec<String>> {
        v.as_object()
            .unwrap()
            .iter()
            .map(|(k, items)| {
                let items = items
                    .as_array()
                    .unwrap()
                    .iter()
                    .map(|i| i.as_str().unwrap().to_string())
                    .collect();
                (k.clone(), items)
            })
            .collect()
    };
    Ok(Analysis {
        top: AmbientId::Top.to_string(),
        contents: string_map(&value["contents"]),
        bindings: string_map(&value["bindings"]),
        constraints: result.stats.constraints,
        iterations: result.stats.iterations,
    })
}

#[pymethods]
impl Process {
    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Process({:?})", self.inner.to_string())
    }

    fn __eq__(&self, other: &Process) -> bool {
        alpha_equal(&self.inner, &other.inner)
    }

    /// Canonical source text; `parse` accepts it back.
    fn pretty(&self) -> String {
        self.inner.to_string()
    }

    /// Congruence normal form, as source text.
    fn normalized(&self) -> String {
        normalize(&self.inner).to_string()
    }

    /// Immediate successors as `(rule family, process)` pairs.
    fn steps(&self) -> Vec<(String, Process)> {
        step(&self.inner)
            .into_iter()
            .map(|(r, q)| (r.family().to_string(), Process { inner: q }))
            .collect()
    }

    /// Breadth-first state space up to `depth` steps and `max_states` states.
    #[pyo3(signature = (depth = DEFAULT_MAX_DEPTH, max_states = DEFAULT_MAX_STATES))]
    fn explore(&self, depth: usize, max_states: usize) -> Space {
        let space = explore(&self.inner, depth, max_states);
        Space {
            states: space.states.iter().map(|s| s.to_string()).collect(),
            edges: space
                .edges
                .iter()
                .map(|(a, r, b)| (*a, r.family().to_string(), *b))
                .collect(),
            depth_reached: space.depth_reached,
            truncated: space.truncated,
        }
    }

    /// Over-approximate contents and bindings relations.
    fn analyze(&self) -> PyResult<Analysis> {
        analysis_data(&self.inner).map_err(PyValueError::new_err)
    }

    /// Check the analysis against every state reachable within `depth` steps,
    /// and report precision against what the exploration observed.
    #[pyo3(signature = (depth = 6, max_states = DEFAULT_MAX_STATES))]
    fn check_theorem(&self, depth: usize, max_states: usize) -> PyResult<Report> {
        let report = verify::check_theorem(&self.inner, depth, max_states)
            .map_err(|e| PyValueError::new_err(e.to_string()))?;
        let precision = verify::measure_precision(&self.inner, depth, max_states)
            .map_err(|e| PyValueError::new_err(e.to_string()))?;
        let pairs = |set: &std::collections::BTreeSet<(AmbientId, AmbientId)>| {
            set.iter().map(|(p, c)| (p.to_string(), c.to_string())).collect()
        };
        let mut violations = Vec::new();
        for v in &report.violations {
            for f in &v.failures {
                violations.push((v.state, f.rule.to_string(), f.detail.clone()));
            }
        }
        Ok(Report {
            ok: report.violations.is_empty(),
            states_checked: report.states_checked,
            violations,
            spurious: pairs(&precision.spurious),
            missed: pairs(&precision.missed),
            truncated: report.truncated || precision.truncated,
        })
    }
}

/// Parse BioAmbients source text into a process.
#[pyfunction]
fn parse(src: &str) -> PyResult<Process> {
    bioamb::parser::parse(src)
        .map(|p| Process { inner: p })
        .map_err(|e| PyValueError::new_err(e.to_string()))
}

/// Reproducible random well-formed terms, as source text.
#[pyfunction]
#[pyo3(signature = (seed = 42, count = 10))]
fn generate(seed: u64, count: usize) -> Vec<String> {
    verify::generate_terms(seed, count).iter().map(|p| p.to_string()).collect()
}

#[pymodule]
fn bioamb_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Process>()?;
    m.add_class::<Analysis>()?;
    m.add_class::<Space>()?;
    m.add_class::<Report>()?;
    m.add_function(wrap_pyfunction!(parse, m)?)?;
    m.add_function(wrap_pyfunction!(generate, m)?)?;
    Ok(())
}

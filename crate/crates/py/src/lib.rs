//! Python bindings: parse a spec, inspect its decomposition, generate a
//! k-wise suite and check its coverage without leaving Python.
//!
//! Structured results (tests, strata, coverage, requests) cross the boundary
//! as JSON and come out as plain dicts and lists.

use pyo3::exceptions::{PyKeyError, PyValueError};
use pyo3::prelude::*;
use serde::Serialize;

use stratagen::combinator::{coverage_check, gen_suite, SuiteConfig, SuiteMode, TestCase};
use stratagen::decompose::{decompose_api, dump_components, Component, DecompositionConfig};
use stratagen::providers::{fill_strata, MockDataset, ProviderKind, ProviderSet, SeededRng, StaticTable};
use stratagen::runner::{self, prepare_requests, ApiSuite};
use stratagen::spec::{self, ApiSig, ApiSpec};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py<'py>(py: Python<'py>, v: &impl Serialize) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(v).map_err(value_err)?;
    py.import("json")?.call_method1("loads", (text,))
}

/// A parsed API specification.
#[pyclass(frozen, module = "stratagen_py")]
struct Spec {
    inner: ApiSpec,
}

impl Spec {
    fn api(&self, name: &str) -> PyResult<&ApiSig> {
        self.inner
            .api(name)
            .ok_or_else(|| PyKeyError::new_err(format!("unknown api `{name}`")))
    }
}

#[pymethods]
impl Spec {
    /// Api names in declaration order.
    #[getter]
    fn apis(&self) -> Vec<String> {
        self.inner.apis.iter().map(|a| a.name.clone()).collect()
    }

    fn signature(&self, api: &str) -> PyResult<String> {
        Ok(self.api(api)?.signature())
    }

    /// Canonical source text.
    fn pretty(&self) -> String {
        self.inner.pretty()
    }

    /// One line per component; all apis when `api` is omitted.
    #[pyo3(signature = (api=None, max_len=3, max_depth=3))]
    fn dump_components(&self, api: Option<&str>, max_len: usize, max_depth: usize) -> PyResult<String> {
        let cfg = DecompositionConfig { max_len, max_depth };
        let apis: Vec<&ApiSig> = match api {
            Some(name) => vec![self.api(name)?],
            None => self.inner.apis.iter().collect(),
        };
        let mut out = String::new();
        for a in apis {
            let d = decompose_api(&self.inner, a, &cfg).map_err(value_err)?;
            if api.is_none() {
                out.push_str(&format!("# {}\n", a.signature()));
            }
            out.push_str(&dump_components(&d.components));
        }
        Ok(out)
    }

    fn __repr__(&self) -> String {
        format!("Spec(apis={:?})", self.apis())
    }
}

/// A generated suite for one api, with the strata it was built from.
#[pyclass(frozen, module = "stratagen_py")]
struct Suite {
    spec: ApiSpec,
    api: ApiSig,
    decomposition: DecompositionConfig,
    k: usize,
    components: Vec<Component>,
    tests: Vec<TestCase>,
}

#[derive(Serialize)]
struct Stratum<'a> {
    path: &'a str,
    guards: Vec<String>,
    values: &'a [stratagen::value::Value],
}

#[pymethods]
impl Suite {
    #[getter]
    fn api(&self) -> String {
        self.api.name.clone()
    }

    /// Each test's assignments, keyed by component path.
    #[getter]
    fn tests<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let a: Vec<_> = self.tests.iter().map(|t| &t.assignments).collect();
        to_py(py, &a)
    }

    #[getter]
    fn strata<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let s: Vec<Stratum> = self
            .components
            .iter()
            .map(|c| Stratum {
                path: c.path.as_str(),
                guards: c.guards.iter().map(|g| g.to_string()).collect(),
                values: &c.values,
            })
            .collect();
        to_py(py, &s)
    }

    /// Feasible and uncovered k-tuples; defaults to the k the suite was
    /// generated with.
    #[pyo3(signature = (k=None))]
    fn coverage_check<'py>(&self, py: Python<'py>, k: Option<usize>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &coverage_check(&self.tests, &self.components, k.unwrap_or(self.k)))
    }

    /// The HTTP requests the suite turns into.
    fn requests<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let suites = [ApiSuite { api: self.api.name.clone(), tests: self.tests.clone() }];
        let reqs = prepare_requests(&self.spec, &suites, self.decomposition, &self.components).map_err(value_err)?;
        to_py(py, &reqs)
    }

    fn __len__(&self) -> usize {
        self.tests.len()
    }

    fn __repr__(&self) -> String {
        format!("Suite(api={:?}, tests={})", self.api.name, self.tests.len())
    }
}

#[pyfunction]
fn parse_spec(text: &str) -> PyResult<Spec> {
    spec::parse_spec(text).map(|inner| Spec { inner }).map_err(value_err)
}

/// Decomposes `api`, fills strata and builds a k-wise suite.
///
/// `static_table` and `mock_data` are JSON texts in the same formats as the
/// files the command line accepts.
#[pyfunction]
#[pyo3(signature = (
    spec, api, k=2, seed=0, mode="full", providers=None, static_table=None, mock_data=None,
    cap=6, max_len=3, max_depth=3,
))]
#[allow(clippy::too_many_arguments)]
fn generate(
    py: Python<'_>,
    spec: &Spec,
    api: &str,
    k: usize,
    seed: u64,
    mode: &str,
    providers: Option<Vec<String>>,
    static_table: Option<&str>,
    mock_data: Option<&str>,
    cap: usize,
    max_len: usize,
    max_depth: usize,
) -> PyResult<Suite> {
    let sig = spec.api(api)?.clone();
    let order = providers
        .unwrap_or_else(|| vec!["random".into()])
        .iter()
        .map(|p| p.parse::<ProviderKind>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(value_err)?;
    let mode: SuiteMode = mode.parse().map_err(value_err)?;
    let mut ps = ProviderSet::new(order);
    ps.cap = cap;
    if let Some(t) = static_table {
        ps = ps.with_static(StaticTable::from_json_str(t, "static_table").map_err(value_err)?);
    }
    if let Some(m) = mock_data {
        ps = ps.with_mock(MockDataset::from_json_str(m, "mock_data").map_err(value_err)?);
    }
    let decomposition = DecompositionConfig { max_len, max_depth };
    let inner = spec.inner.clone();
    py.detach(move || {
        let mut components = decompose_api(&inner, &sig, &decomposition).map_err(value_err)?.components;
        fill_strata(&mut components, &ps, &SeededRng::new(seed), &inner, &sig).map_err(value_err)?;
        let tests = gen_suite(&components, &SuiteConfig { k, mode, seed }).map_err(value_err)?;
        Ok(Suite { spec: inner, api: sig, decomposition, k: k.min(components.len()), components, tests })
    })
}

/// Api names in execution order: auth, reads, writes, deletes.
#[pyfunction]
fn order_endpoints(spec: &Spec) -> Vec<String> {
    runner::order_endpoints(&spec.inner.apis).into_iter().map(|a| a.name.clone()).collect()
}

#[pymodule]
fn stratagen_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Spec>()?;
    m.add_class::<Suite>()?;
    m.add_function(wrap_pyfunction!(parse_spec, m)?)?;
    m.add_function(wrap_pyfunction!(generate, m)?)?;
    m.add_function(wrap_pyfunction!(order_endpoints, m)?)?;
    Ok(())
}

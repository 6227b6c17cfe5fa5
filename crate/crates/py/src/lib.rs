//! Python module `exdual`.
//!
//! Kinds are given as strings in the same grammar as the command line
//! (`excursion`, `meander`, `bessel:1.5`, `beta:2,0.5`, `nu:0.3:0.5,1:0.5`)
//! or as [`Kind`] objects. Domain and usage errors raise `ValueError`,
//! unsupported Monte Carlo routes raise `NotImplementedError`.

use exdual::harness::{self, DualityInstance, HarnessSettings, KindFamily, Methods, Reduced, VerificationReport};
use exdual::mc::{self, PathSource, SeededStream};
use exdual::quad::{self, QuadSettings};
use exdual::{kernels, selftest, ArgGrid, Error, ProcessKind, TimeGrid};
use pyo3::exceptions::{PyNotImplementedError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Domain(_) | Error::Usage(_) => PyValueError::new_err(e.to_string()),
        Error::Unsupported(_) => PyNotImplementedError::new_err(e.to_string()),
        Error::Convergence { .. } | Error::Sampler(_) => PyRuntimeError::new_err(e.to_string()),
    }
}

trait OrPy<T> {
    fn py(self) -> PyResult<T>;
}

impl<T> OrPy<T> for exdual::Result<T> {
    fn py(self) -> PyResult<T> {
        self.map_err(py_err)
    }
}

/// A process kind: the excursion or a generalized meander.
#[pyclass(name = "Kind", frozen, eq, from_py_object, module = "exdual")]
#[derive(Clone, PartialEq)]
pub struct Kind(ProcessKind);

#[pymethods]
impl Kind {
    #[new]
    fn new(spec: &str) -> PyResult<Self> {
        spec.parse().py().map(Kind)
    }

    #[staticmethod]
    fn bessel(delta: f64) -> PyResult<Self> {
        ProcessKind::bessel(delta).py().map(Kind)
    }

    #[staticmethod]
    fn beta(alpha: f64, beta: f64) -> PyResult<Self> {
        ProcessKind::beta(alpha, beta).py().map(Kind)
    }

    /// Atoms as `(v, weight)` pairs; weights must sum to one.
    #[staticmethod]
    fn discrete(atoms: Vec<(f64, f64)>) -> PyResult<Self> {
        ProcessKind::discrete(atoms).py().map(Kind)
    }

    #[getter]
    fn is_excursion(&self) -> bool {
        self.0.is_excursion()
    }

    /// Dual weight at `x`: `φ_ν(x)`, or the excursion weight.
    fn weight(&self, x: f64) -> PyResult<f64> {
        kernels::dual_weight(&self.0, x).py()
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Kind('{}')", self.0)
    }
}

#[derive(FromPyObject)]
enum KindArg {
    Kind(Kind),
    Spec(String),
}

impl KindArg {
    fn resolve(self) -> PyResult<ProcessKind> {
        match self {
            KindArg::Kind(k) => Ok(k.0),
            KindArg::Spec(s) => s.parse().py(),
        }
    }
}

/// Quadrature value with its error bound.
#[pyclass(name = "Estimate", frozen, get_all, skip_from_py_object, module = "exdual")]
#[derive(Clone)]
pub struct PyEstimate {
    value: f64,
    error: f64,
    method: String,
}

impl From<exdual::Estimate> for PyEstimate {
    fn from(e: exdual::Estimate) -> Self {
        Self { value: e.value, error: e.error, method: e.method.to_string() }
    }
}

#[pymethods]
impl PyEstimate {
    fn __repr__(&self) -> String {
        format!("Estimate(value={}, error={:e}, method='{}')", self.value, self.error, self.method)
    }
}

/// Monte Carlo mean with standard error, replicate count and effective sample size.
#[pyclass(name = "McEstimate", frozen, get_all, skip_from_py_object, module = "exdual")]
#[derive(Clone)]
pub struct PyMcEstimate {
    value: f64,
    std_error: f64,
    n: u64,
    ess: f64,
}

impl From<mc::McEstimate> for PyMcEstimate {
    fn from(e: mc::McEstimate) -> Self {
        Self { value: e.value, std_error: e.std_error, n: e.n, ess: e.ess }
    }
}

#[pymethods]
impl PyMcEstimate {
    fn __repr__(&self) -> String {
        format!("McEstimate(value={}, std_error={:e}, n={}, ess={})", self.value, self.std_error, self.n, self.ess)
    }
}

/// A duality instance: kind, arguments `s` and times `t`.
#[pyclass(name = "Instance", frozen, skip_from_py_object, module = "exdual")]
#[derive(Clone)]
pub struct Instance(DualityInstance);

#[derive(IntoPyObject)]
enum ReducedOut {
    Instance(Instance),
    Exact(f64),
}

#[pymethods]
impl Instance {
    #[new]
    #[pyo3(signature = (kind, s, t, label = String::new()))]
    fn new(kind: KindArg, s: Vec<f64>, t: Vec<f64>, label: String) -> PyResult<Self> {
        DualityInstance::from_vecs(kind.resolve()?, s, t, label).py().map(Instance)
    }

    #[getter]
    fn kind(&self) -> Kind {
        Kind(self.0.kind.clone())
    }

    #[getter]
    fn s(&self) -> Vec<f64> {
        self.0.s.as_slice().to_vec()
    }

    #[getter]
    fn t(&self) -> Vec<f64> {
        self.0.t.as_slice().to_vec()
    }

    #[getter]
    fn label(&self) -> String {
        self.0.label.clone()
    }

    #[getter]
    fn depth(&self) -> usize {
        self.0.depth()
    }

    fn has_boundary(&self) -> bool {
        self.0.has_boundary()
    }

    /// Remove pinned boundary times: an interior instance, or the exact value.
    fn reduce(&self) -> PyResult<ReducedOut> {
        Ok(match harness::reduce_boundary(&self.0).py()? {
            Reduced::Instance(i) => ReducedOut::Instance(Instance(i)),
            Reduced::Exact { value } => ReducedOut::Exact(value),
        })
    }

    fn __repr__(&self) -> String {
        format!("Instance('{}', s={:?}, t={:?})", self.0.kind, self.0.s.as_slice(), self.0.t.as_slice())
    }
}

/// Result of [`verify`].
#[pyclass(name = "Report", frozen, module = "exdual")]
pub struct Report(VerificationReport);

#[pymethods]
impl Report {
    #[getter]
    fn passed(&self) -> bool {
        self.0.passed()
    }

    #[getter]
    fn reasons(&self) -> Vec<String> {
        self.0.verdict.reasons.clone()
    }

    #[getter]
    fn lhs_quad(&self) -> Option<PyEstimate> {
        self.0.lhs_quad.map(Into::into)
    }

    #[getter]
    fn rhs_quad(&self) -> Option<PyEstimate> {
        self.0.rhs_quad.map(Into::into)
    }

    #[getter]
    fn lhs_mc(&self) -> Option<PyMcEstimate> {
        self.0.lhs_mc.map(Into::into)
    }

    #[getter]
    fn rhs_mc(&self) -> Option<PyMcEstimate> {
        self.0.rhs_mc.map(Into::into)
    }

    #[getter]
    fn quad_discrepancy(&self) -> Option<f64> {
        self.0.quad_discrepancy
    }

    /// `(pair, z)` for every comparison involving Monte Carlo.
    #[getter]
    fn z_scores(&self) -> Vec<(String, f64)> {
        self.0.mc_z_scores.iter().map(|z| (z.pair.clone(), z.z)).collect()
    }

    #[getter]
    fn instance(&self) -> Instance {
        Instance(self.0.instance.clone())
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.0).map_err(|e| PyRuntimeError::new_err(e.to_string()))
    }

    fn __repr__(&self) -> String {
        format!("Report(passed={}, quad_discrepancy={:?})", self.0.passed(), self.0.quad_discrepancy)
    }
}

fn grids(s: Vec<f64>, t: Vec<f64>) -> PyResult<(ArgGrid, TimeGrid)> {
    Ok((ArgGrid::new(s).py()?, TimeGrid::new(t).py()?))
}

fn quad_settings(rel_tol: f64) -> QuadSettings {
    QuadSettings { rel_tol, ..Default::default() }
}

/// Left-hand side, the Laplace transform of the process margins, by quadrature.
#[pyfunction]
#[pyo3(signature = (kind, s, t, rel_tol = 1e-8))]
fn lhs_laplace(py: Python<'_>, kind: KindArg, s: Vec<f64>, t: Vec<f64>, rel_tol: f64) -> PyResult<PyEstimate> {
    let kind = kind.resolve()?;
    let (s, t) = grids(s, t)?;
    py.detach(|| quad::lhs_laplace(&kind, &s, &t, &quad_settings(rel_tol))).py().map(Into::into)
}

/// Right-hand side, the weighted expectation over `X`, by quadrature.
#[pyfunction]
#[pyo3(signature = (kind, s, t, rel_tol = 1e-8))]
fn rhs_dual(py: Python<'_>, kind: KindArg, s: Vec<f64>, t: Vec<f64>, rel_tol: f64) -> PyResult<PyEstimate> {
    let kind = kind.resolve()?;
    let (s, t) = grids(s, t)?;
    py.detach(|| quad::rhs_dual(&kind, &s, &t, &quad_settings(rel_tol))).py().map(Into::into)
}

#[pyfunction]
#[pyo3(signature = (kind, s, t, n, seed = 0, stream_id = 0))]
fn mc_lhs(py: Python<'_>, kind: KindArg, s: Vec<f64>, t: Vec<f64>, n: u64, seed: u64, stream_id: u64) -> PyResult<PyMcEstimate> {
    let kind = kind.resolve()?;
    let (s, t) = grids(s, t)?;
    py.detach(|| mc::mc_lhs(&kind, &s, &t, n, SeededStream::new(seed, stream_id))).py().map(Into::into)
}

#[pyfunction]
#[pyo3(signature = (kind, s, t, n, seed = 0, stream_id = 0))]
fn mc_rhs(py: Python<'_>, kind: KindArg, s: Vec<f64>, t: Vec<f64>, n: u64, seed: u64, stream_id: u64) -> PyResult<PyMcEstimate> {
    let kind = kind.resolve()?;
    let (s, t) = grids(s, t)?;
    py.detach(|| mc::mc_rhs(&kind, &s, &t, n, SeededStream::new(seed, stream_id))).py().map(Into::into)
}

/// Evaluate both sides with `method` in `{"quad", "mc", "both"}` and compare.
#[pyfunction]
#[pyo3(signature = (instance, method = "both", n = 100_000, seed = 0, tol = 1e-6, z_max = 4.0))]
fn verify(py: Python<'_>, instance: &Instance, method: &str, n: u64, seed: u64, tol: f64, z_max: f64) -> PyResult<Report> {
    let methods = match method {
        "quad" => Methods::QUAD,
        "mc" => Methods::MC,
        "both" => Methods::BOTH,
        other => return Err(PyValueError::new_err(format!("method must be 'quad', 'mc' or 'both', got '{other}'"))),
    };
    let hs = HarnessSettings { quad_threshold: tol, z_threshold: z_max, ..Default::default() };
    let inst = instance.0.clone();
    py.detach(|| harness::verify(&inst, methods, &hs, n, SeededStream::new(seed, 0))).py().map(Report)
}

/// A reproducible random instance; `kinds` from `{"excursion", "bessel", "beta", "nu"}`.
#[pyfunction]
#[pyo3(signature = (seed, stream_id = 0, d_max = 3, kinds = None))]
fn random_instance(seed: u64, stream_id: u64, d_max: usize, kinds: Option<Vec<String>>) -> PyResult<Instance> {
    let fams = match kinds {
        None => KindFamily::ALL.to_vec(),
        Some(names) => names
            .iter()
            .map(|k| match k.as_str() {
                "excursion" => Ok(KindFamily::Excursion),
                "bessel" => Ok(KindFamily::Bessel),
                "beta" => Ok(KindFamily::Beta),
                "nu" => Ok(KindFamily::DiscreteNu),
                other => Err(PyValueError::new_err(format!("unknown kind family '{other}'"))),
            })
            .collect::<PyResult<Vec<_>>>()?,
    };
    harness::random_instance(SeededStream::new(seed, stream_id), d_max, &fams).py().map(Instance)
}

/// One path of `kind` at times in `[0, 1]`, or of `X` from `x0` at elapsed times.
#[pyfunction]
#[pyo3(signature = (times, kind = None, x0 = None, seed = 0, stream_id = 0))]
fn sample_path(times: Vec<f64>, kind: Option<KindArg>, x0: Option<f64>, seed: u64, stream_id: u64) -> PyResult<Vec<f64>> {
    let source = match (kind, x0) {
        (Some(k), None) => PathSource::Process { kind: k.resolve()? },
        (None, Some(x0)) => PathSource::X { x0 },
        _ => return Err(PyValueError::new_err("give exactly one of kind and x0")),
    };
    Ok(mc::sample_path(&source, &times, SeededStream::new(seed, stream_id)).py()?.values)
}

#[pyfunction]
fn x_transition(t: f64, x: f64, y: f64) -> PyResult<f64> {
    kernels::x_transition(t, x, y).py()
}

#[pyfunction]
fn excursion_fdd(t: Vec<f64>, y: Vec<f64>) -> PyResult<f64> {
    kernels::excursion_fdd(&TimeGrid::new(t).py()?, &y).py()
}

/// The full self-test suite as `(module, name, passed, detail)` rows.
#[pyfunction]
#[pyo3(signature = (seed = 0))]
fn run_selftest(py: Python<'_>, seed: u64) -> Vec<(String, String, bool, String)> {
    py.detach(|| selftest::run_selftest(seed)).into_iter().map(|c| (c.module, c.name, c.pass, c.detail)).collect()
}

#[pymodule]
#[pyo3(name = "exdual")]
fn exdual_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", exdual::VERSION)?;
    m.add_class::<Kind>()?;
    m.add_class::<Instance>()?;
    m.add_class::<PyEstimate>()?;
    m.add_class::<PyMcEstimate>()?;
    m.add_class::<Report>()?;
    m.add_function(wrap_pyfunction!(lhs_laplace, m)?)?;
    m.add_function(wrap_pyfunction!(rhs_dual, m)?)?;
    m.add_function(wrap_pyfunction!(mc_lhs, m)?)?;
    m.add_function(wrap_pyfunction!(mc_rhs, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(random_instance, m)?)?;
    m.add_function(wrap_pyfunction!(sample_path, m)?)?;
    m.add_function(wrap_pyfunction!(x_transition, m)?)?;
    m.add_function(wrap_pyfunction!(excursion_fdd, m)?)?;
    m.add_function(wrap_pyfunction!(run_selftest, m)?)?;
    Ok(())
}

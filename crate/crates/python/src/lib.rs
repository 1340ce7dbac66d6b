//! Python bindings: `import entfid`.

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use serde_json::Value;

use entfid_core::channels::{self as ch, StandardChannel};
use entfid_core::extremal::{self, SearchBudget, SearchResult};
use entfid_core::fidelity;
use entfid_core::io;
use entfid_core::numerics::ComplexMatrix;
use entfid_core::states::{self as st, PureState};

fn err(e: entfid_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn matrix_from_rows(rows: Vec<Vec<Complex64>>) -> PyResult<ComplexMatrix> {
    let n_rows = rows.len();
    let n_cols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != n_cols) {
        return Err(PyValueError::new_err("entries: rows have different lengths"));
    }
    ComplexMatrix::from_row_major(n_rows, n_cols, rows.into_iter().flatten().collect()).map_err(err)
}

fn matrix_to_rows(m: &ComplexMatrix) -> Vec<Vec<Complex64>> {
    (0..m.rows()).map(|r| (0..m.cols()).map(|c| m.get(r, c)).collect()).collect()
}

fn to_python(py: Python<'_>, value: &Value) -> PyResult<Py<PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok(py.import("json")?.call_method1("loads", (text,))?.unbind())
}

fn serialize<T: serde::Serialize>(py: Python<'_>, value: &T) -> PyResult<Py<PyAny>> {
    to_python(py, &serde_json::to_value(value).map_err(|e| PyValueError::new_err(e.to_string()))?)
}

/// Density operator: Hermitian, positive semidefinite, unit trace.
#[pyclass(name = "DensityOperator", frozen, from_py_object)]
#[derive(Clone)]
pub struct PyDensityOperator {
    inner: st::DensityOperator,
}

#[pymethods]
impl PyDensityOperator {
    /// Validates a square matrix given as a list of rows of complex numbers.
    #[new]
    fn new(entries: Vec<Vec<Complex64>>) -> PyResult<Self> {
        let inner = st::DensityOperator::new(matrix_from_rows(entries)?).map_err(err)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn maximally_mixed(dim: usize) -> PyResult<Self> {
        if dim == 0 {
            return Err(PyValueError::new_err("dim must be positive"));
        }
        Ok(Self {
            inner: st::DensityOperator::maximally_mixed(dim),
        })
    }

    /// `|psi><psi|` for a unit vector.
    #[staticmethod]
    fn from_pure(amplitudes: Vec<Complex64>) -> PyResult<Self> {
        let psi = PureState::new(amplitudes).map_err(err)?;
        Ok(Self {
            inner: st::density_from_pure(&psi),
        })
    }

    #[staticmethod]
    fn random(dim: usize, rank: usize, seed: u64) -> PyResult<Self> {
        Ok(Self {
            inner: st::random_density(dim, rank, seed).map_err(err)?,
        })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: io::parse_state(text).map_err(err)?,
        })
    }

    fn to_json(&self) -> String {
        io::density_to_json(&self.inner)
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn rank(&self) -> usize {
        self.inner.rank()
    }

    fn matrix(&self) -> Vec<Vec<Complex64>> {
        matrix_to_rows(self.inner.matrix())
    }

    fn __repr__(&self) -> String {
        format!("DensityOperator(dim={})", self.inner.dim())
    }
}

/// Quantum channel in operator-sum form.
#[pyclass(name = "QuantumChannel", frozen, from_py_object)]
#[derive(Clone)]
pub struct PyQuantumChannel {
    inner: ch::QuantumChannel,
}

impl PyQuantumChannel {
    fn standard(kind: StandardChannel, dim: usize) -> PyResult<Self> {
        Ok(Self {
            inner: ch::standard_channel(&kind, dim).map_err(err)?,
        })
    }
}

#[pymethods]
impl PyQuantumChannel {
    /// Validates completeness of the Kraus operators (each a list of rows).
    #[new]
    fn new(kraus: Vec<Vec<Vec<Complex64>>>) -> PyResult<Self> {
        let ops = kraus.into_iter().map(matrix_from_rows).collect::<PyResult<Vec<_>>>()?;
        Ok(Self {
            inner: ch::QuantumChannel::new(ops).map_err(err)?,
        })
    }

    #[staticmethod]
    fn identity(dim: usize) -> PyResult<Self> {
        Self::standard(StandardChannel::Identity, dim)
    }

    #[staticmethod]
    #[pyo3(signature = (p, dim = 2))]
    fn depolarizing(p: f64, dim: usize) -> PyResult<Self> {
        Self::standard(StandardChannel::Depolarizing(p), dim)
    }

    #[staticmethod]
    #[pyo3(signature = (p, dim = 2))]
    fn dephasing(p: f64, dim: usize) -> PyResult<Self> {
        Self::standard(StandardChannel::Dephasing(p), dim)
    }

    #[staticmethod]
    fn amplitude_damping(gamma: f64) -> PyResult<Self> {
        Self::standard(StandardChannel::AmplitudeDamping(gamma), 2)
    }

    /// Channel on `dim_in`-dimensional inputs that always outputs `state`.
    #[staticmethod]
    fn replace_with(state: &PyDensityOperator, dim_in: usize) -> PyResult<Self> {
        Self::standard(StandardChannel::ReplaceWith(state.inner.clone()), dim_in)
    }

    #[staticmethod]
    fn random(dim: usize, kraus_count: usize, seed: u64) -> PyResult<Self> {
        Ok(Self {
            inner: ch::random_channel(dim, kraus_count, seed).map_err(err)?,
        })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: io::parse_channel(text).map_err(err)?,
        })
    }

    fn to_json(&self) -> String {
        io::channel_to_json(&self.inner)
    }

    #[getter]
    fn dim_in(&self) -> usize {
        self.inner.dim_in()
    }

    #[getter]
    fn dim_out(&self) -> usize {
        self.inner.dim_out()
    }

    fn kraus(&self) -> Vec<Vec<Vec<Complex64>>> {
        self.inner.kraus().iter().map(matrix_to_rows).collect()
    }

    fn apply(&self, state: &PyDensityOperator) -> PyResult<PyDensityOperator> {
        Ok(PyDensityOperator {
            inner: self.inner.apply(&state.inner).map_err(err)?,
        })
    }

    fn __repr__(&self) -> String {
        format!(
            "QuantumChannel(dim_in={}, dim_out={}, kraus={})",
            self.inner.dim_in(),
            self.inner.dim_out(),
            self.inner.kraus().len()
        )
    }
}

/// `(tr |sqrt(a) sqrt(b)|)^2`.
#[pyfunction]
fn uhlmann_fidelity(a: &PyDensityOperator, b: &PyDensityOperator) -> PyResult<f64> {
    Ok(fidelity::uhlmann_fidelity(&a.inner, &b.inner).map_err(err)?.value)
}

/// Entanglement fidelity by `method` "kraus" (default) or "purification".
#[pyfunction]
#[pyo3(signature = (state, channel, method = "kraus"))]
fn entanglement_fidelity(state: &PyDensityOperator, channel: &PyQuantumChannel, method: &str) -> PyResult<f64> {
    let value = match method {
        "kraus" => fidelity::entanglement_fidelity_kraus(&state.inner, &channel.inner),
        "purification" => fidelity::entanglement_fidelity_purification(&state.inner, &channel.inner),
        other => return Err(PyValueError::new_err(format!("unknown method `{other}`"))),
    };
    Ok(value.map_err(err)?.value)
}

#[pyfunction]
fn fidelity_report(py: Python<'_>, state: &PyDensityOperator, channel: &PyQuantumChannel) -> PyResult<Py<PyAny>> {
    serialize(py, &fidelity::fidelity_report(&state.inner, &channel.inner).map_err(err)?)
}

fn budget(restarts: usize, iterations: usize, seed: u64, aux_dim: usize) -> PyResult<SearchBudget> {
    SearchBudget::new(restarts, iterations, seed, aux_dim).map_err(err)
}

fn search_dict(py: Python<'_>, result: &SearchResult) -> PyResult<Py<PyAny>> {
    serialize(py, &result.to_json())
}

/// Minimum of `F(ext, (E x I)(ext))` over extensions to an auxiliary system of
/// dimension `aux_dim` (default: rank of the state).
#[pyfunction]
#[pyo3(signature = (state, channel, restarts = 4, iterations = 1000, seed = 0, aux_dim = None))]
fn f2_search(
    py: Python<'_>,
    state: &PyDensityOperator,
    channel: &PyQuantumChannel,
    restarts: usize,
    iterations: usize,
    seed: u64,
    aux_dim: Option<usize>,
) -> PyResult<Py<PyAny>> {
    let b = budget(restarts, iterations, seed, aux_dim.unwrap_or_else(|| state.inner.rank()))?;
    search_dict(py, &extremal::f2_search(&state.inner, &channel.inner, &b).map_err(err)?)
}

/// Joint minimum over extensions and dynamics on the auxiliary system.
#[pyfunction]
#[pyo3(signature = (state, channel, restarts = 4, iterations = 1000, seed = 0, aux_dim = None))]
fn f1_search(
    py: Python<'_>,
    state: &PyDensityOperator,
    channel: &PyQuantumChannel,
    restarts: usize,
    iterations: usize,
    seed: u64,
    aux_dim: Option<usize>,
) -> PyResult<Py<PyAny>> {
    let b = budget(restarts, iterations, seed, aux_dim.unwrap_or_else(|| state.inner.rank()))?;
    search_dict(py, &extremal::f1_search(&state.inner, &channel.inner, &b).map_err(err)?)
}

/// Estimated minimum of `<psi|E(psi)|psi>` over pure inputs.
#[pyfunction]
#[pyo3(signature = (channel, restarts = 8, iterations = 2000, seed = 0))]
fn min_pure_fidelity(
    py: Python<'_>,
    channel: &PyQuantumChannel,
    restarts: usize,
    iterations: usize,
    seed: u64,
) -> PyResult<Py<PyAny>> {
    let b = budget(restarts, iterations, seed, 1)?;
    search_dict(py, &extremal::min_pure_fidelity(&channel.inner, &b).map_err(err)?)
}

#[pyfunction]
#[pyo3(signature = (channel, n_states = 50, restarts = 8, iterations = 2000, seed = 0))]
fn knill_laflamme_check(
    py: Python<'_>,
    channel: &PyQuantumChannel,
    n_states: usize,
    restarts: usize,
    iterations: usize,
    seed: u64,
) -> PyResult<Py<PyAny>> {
    let b = budget(restarts, iterations, seed, 1)?;
    serialize(py, &extremal::knill_laflamme_check(&channel.inner, n_states, &b).map_err(err)?)
}

#[pymodule]
fn entfid(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyDensityOperator>()?;
    m.add_class::<PyQuantumChannel>()?;
    m.add_function(wrap_pyfunction!(uhlmann_fidelity, m)?)?;
    m.add_function(wrap_pyfunction!(entanglement_fidelity, m)?)?;
    m.add_function(wrap_pyfunction!(fidelity_report, m)?)?;
    m.add_function(wrap_pyfunction!(f2_search, m)?)?;
    m.add_function(wrap_pyfunction!(f1_search, m)?)?;
    m.add_function(wrap_pyfunction!(min_pure_fidelity, m)?)?;
    m.add_function(wrap_pyfunction!(knill_laflamme_check, m)?)?;
    Ok(())
}

//! Python bindings: states, transition matrices, KD tables, witnesses,
//! hull certificates and convex-roof bounds. Structured results are returned
//! as plain dicts and lists.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use pyo3::IntoPyObjectExt;
use serde_json::Value;

use kdwit::numerics::{haar_unitary as haar, CMatrix, C64};
use kdwit::roof::RoofConfig;
use kdwit::{DensityMatrix, Error, PureState, Tolerances, TransitionMatrix};

fn err(e: Error) -> PyErr {
    if e.is_validation() {
        PyValueError::new_err(e.to_string())
    } else {
        PyRuntimeError::new_err(e.to_string())
    }
}

fn to_py<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    match v {
        Value::Null => Ok(py.None().into_bound(py)),
        Value::Bool(b) => b.into_bound_py_any(py),
        Value::Number(n) => match n.as_i64() {
            Some(i) => i.into_bound_py_any(py),
            None => n.as_f64().unwrap_or(f64::NAN).into_bound_py_any(py),
        },
        Value::String(s) => s.into_bound_py_any(py),
        Value::Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(to_py(py, item)?)?;
            }
            Ok(list.into_any())
        }
        Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, item) in map {
                dict.set_item(k, to_py(py, item)?)?;
            }
            Ok(dict.into_any())
        }
    }
}

fn serialize<'py, T: ?Sized + serde::Serialize>(
    py: Python<'py>,
    v: &T,
) -> PyResult<Bound<'py, PyAny>> {
    let value = serde_json::to_value(v).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    to_py(py, &value)
}

fn matrix_from_rows(rows: Vec<Vec<C64>>) -> PyResult<CMatrix> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(PyValueError::new_err("expected a square nested list"));
    }
    CMatrix::from_vec(n, n, rows.into_iter().flatten().collect()).map_err(err)
}

fn matrix_rows(m: &CMatrix) -> Vec<Vec<C64>> {
    (0..m.rows()).map(|i| m.row(i).to_vec()).collect()
}

#[pyclass(name = "TransitionMatrix", frozen, from_py_object, module = "kdwit_py")]
#[derive(Clone)]
struct PyTransition(TransitionMatrix);

#[pymethods]
impl PyTransition {
    /// `U_ij = <a_i|b_j>` as a nested list of complex numbers.
    #[new]
    fn new(rows: Vec<Vec<C64>>) -> PyResult<Self> {
        Ok(Self(
            TransitionMatrix::new(matrix_from_rows(rows)?).map_err(err)?,
        ))
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn matrix(&self) -> Vec<Vec<C64>> {
        matrix_rows(self.0.matrix())
    }

    fn min_overlap(&self) -> f64 {
        self.0.min_overlap()
    }

    #[pyo3(signature = (eps = 1e-9))]
    fn complete_incompatibility<'py>(
        &self,
        py: Python<'py>,
        eps: f64,
    ) -> PyResult<Bound<'py, PyAny>> {
        serialize(
            py,
            &kdwit::incompatibility::complete_incompatibility(&self.0, eps).map_err(err)?,
        )
    }

    fn __repr__(&self) -> String {
        format!("TransitionMatrix(dim={})", self.0.dim())
    }
}

#[pyclass(name = "PureState", frozen, from_py_object, module = "kdwit_py")]
#[derive(Clone)]
struct PyPure(PureState);

#[pymethods]
impl PyPure {
    #[new]
    #[pyo3(signature = (amplitudes, normalize = false))]
    fn new(amplitudes: Vec<C64>, normalize: bool) -> PyResult<Self> {
        let s = if normalize {
            PureState::normalized(amplitudes)
        } else {
            PureState::new(amplitudes)
        };
        Ok(Self(s.map_err(err)?))
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn amplitudes(&self) -> Vec<C64> {
        self.0.amplitudes().to_vec()
    }

    fn phase_distance(&self, other: &PyPure) -> f64 {
        self.0.phase_distance(&other.0)
    }

    fn __repr__(&self) -> String {
        format!("PureState({:?})", self.0.amplitudes())
    }
}

#[pyclass(name = "DensityMatrix", frozen, from_py_object, module = "kdwit_py")]
#[derive(Clone)]
struct PyDensity(DensityMatrix);

#[pymethods]
impl PyDensity {
    #[new]
    fn new(rows: Vec<Vec<C64>>) -> PyResult<Self> {
        Ok(Self(
            DensityMatrix::new(matrix_from_rows(rows)?).map_err(err)?,
        ))
    }

    #[staticmethod]
    fn from_pure(state: &PyPure) -> Self {
        Self(DensityMatrix::from_pure(&state.0))
    }

    #[staticmethod]
    fn maximally_mixed(dim: usize) -> Self {
        Self(DensityMatrix::maximally_mixed(dim))
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn matrix(&self) -> Vec<Vec<C64>> {
        matrix_rows(self.0.matrix())
    }

    fn __repr__(&self) -> String {
        format!("DensityMatrix(dim={})", self.0.dim())
    }
}

/// Accepts a `DensityMatrix` or a `PureState`.
fn density(obj: &Bound<'_, PyAny>) -> PyResult<DensityMatrix> {
    if let Ok(d) = obj.cast::<PyDensity>() {
        return Ok(d.get().0.clone());
    }
    if let Ok(p) = obj.cast::<PyPure>() {
        return Ok(DensityMatrix::from_pure(&p.get().0));
    }
    Err(PyValueError::new_err(
        "expected a DensityMatrix or a PureState",
    ))
}

fn densities(objs: &Bound<'_, PyList>) -> PyResult<Vec<DensityMatrix>> {
    objs.iter().map(|o| density(&o)).collect()
}

fn roof_config(seed: u64, restarts: usize, steps: usize) -> RoofConfig {
    RoofConfig {
        seed,
        restarts,
        steps,
        ..RoofConfig::default()
    }
}

/// KD table of a state: `q`, marginals, total nonpositivity and positivity.
#[pyfunction]
#[pyo3(signature = (state, u, tol = 1e-9))]
fn kd_table<'py>(
    py: Python<'py>,
    state: &Bound<'py, PyAny>,
    u: &PyTransition,
    tol: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let table = kdwit::kd::kd_table(&density(state)?, &u.0).map_err(err)?;
    let dict = PyDict::new(py);
    dict.set_item("q", matrix_rows(&table.q))?;
    dict.set_item("a_marginals", table.a_marginals.clone())?;
    dict.set_item("b_marginals", table.b_marginals.clone())?;
    dict.set_item("total_nonpositivity", table.total_nonpositivity())?;
    dict.set_item("positivity", serialize(py, &table.positivity(tol))?)?;
    Ok(dict.into_any())
}

#[pyfunction]
fn total_nonpositivity(state: &Bound<'_, PyAny>, u: &PyTransition) -> PyResult<f64> {
    Ok(kdwit::kd::kd_table(&density(state)?, &u.0)
        .map_err(err)?
        .total_nonpositivity())
}

#[pyfunction]
#[pyo3(signature = (state, u, tol = 1e-9))]
fn is_kd_positive(state: &Bound<'_, PyAny>, u: &PyTransition, tol: f64) -> PyResult<bool> {
    Ok(kdwit::kd::kd_table(&density(state)?, &u.0)
        .map_err(err)?
        .is_kd_positive(tol))
}

/// Support counts; pure states are counted by amplitudes, mixed states by
/// diagonals.
#[pyfunction]
#[pyo3(signature = (state, u, eps = 1e-9))]
fn support_counts<'py>(
    py: Python<'py>,
    state: &Bound<'py, PyAny>,
    u: &PyTransition,
    eps: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let counts = if let Ok(p) = state.cast::<PyPure>() {
        kdwit::incompatibility::support_counts_pure(&p.get().0, &u.0, eps)
    } else {
        kdwit::incompatibility::support_counts_mixed(&density(state)?, &u.0, eps)
    }
    .map_err(err)?;
    serialize(py, &counts)
}

#[pyfunction]
#[pyo3(signature = (u, eps = 1e-9))]
fn min_uncertainty_states(u: &PyTransition, eps: f64) -> PyResult<Vec<PyPure>> {
    let list = kdwit::pure_positive::enumerate_min_uncertainty_states(&u.0, eps).map_err(err)?;
    Ok(list.states.into_iter().map(PyPure).collect())
}

#[pyfunction]
#[pyo3(signature = (u, eps = 1e-9, tol = 1e-9))]
fn kd_positive_pure_states(u: &PyTransition, eps: f64, tol: f64) -> PyResult<Vec<PyPure>> {
    let list = kdwit::pure_positive::enumerate_min_uncertainty_states(&u.0, eps).map_err(err)?;
    let pos = kdwit::pure_positive::filter_kd_positive_pure(&list, &u.0, tol).map_err(err)?;
    Ok(pos.states.into_iter().map(PyPure).collect())
}

/// Hull membership certificate of `target` in the hull of `generators`.
#[pyfunction]
#[pyo3(signature = (target, generators, tol = 1e-8))]
fn membership<'py>(
    py: Python<'py>,
    target: &Bound<'py, PyAny>,
    generators: &Bound<'py, PyList>,
    tol: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let cert = kdwit::geometry::membership_lp(&density(target)?, &densities(generators)?, tol)
        .map_err(err)?;
    serialize(py, &cert)
}

#[pyfunction]
fn facets<'py>(py: Python<'py>, generators: &Bound<'py, PyList>) -> PyResult<Bound<'py, PyAny>> {
    serialize(
        py,
        &kdwit::geometry::facet_enumeration(&densities(generators)?).map_err(err)?,
    )
}

#[pyfunction]
#[pyo3(signature = (state, u, seed = 0, restarts = 40, steps = 2000))]
fn support_roof_bounds<'py>(
    py: Python<'py>,
    state: &Bound<'py, PyAny>,
    u: &PyTransition,
    seed: u64,
    restarts: usize,
    steps: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let rho = density(state)?;
    let est = py
        .detach(|| {
            kdwit::roof::support_roof_bounds(
                &rho,
                &u.0,
                &roof_config(seed, restarts, steps),
                &Tolerances::default(),
            )
        })
        .map_err(err)?;
    serialize(py, &est)
}

#[pyfunction]
#[pyo3(signature = (state, u, positive = None, seed = 0, restarts = 40, steps = 2000))]
fn nonpositivity_roof_bounds<'py>(
    py: Python<'py>,
    state: &Bound<'py, PyAny>,
    u: &PyTransition,
    positive: Option<Vec<PyPure>>,
    seed: u64,
    restarts: usize,
    steps: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let rho = density(state)?;
    let positive: Option<Vec<PureState>> = positive.map(|v| v.into_iter().map(|p| p.0).collect());
    let est = py
        .detach(|| {
            kdwit::roof::nonpositivity_roof_bounds(
                &rho,
                &u.0,
                positive.as_deref(),
                &roof_config(seed, restarts, steps),
                &Tolerances::default(),
            )
        })
        .map_err(err)?;
    serialize(py, &est)
}

#[pyfunction]
fn spin1_transition() -> PyTransition {
    PyTransition(kdwit::case_studies::Spin1Fixture::new().u)
}

/// `ρ_λ` as a nested list; a state only for `λ <= 4/7`.
#[pyfunction]
fn rho_lambda(lam: f64) -> PyResult<Vec<Vec<C64>>> {
    Ok(matrix_rows(
        &kdwit::case_studies::rho_lambda(lam).map_err(err)?,
    ))
}

#[pyfunction]
fn run_spin1_report(py: Python<'_>) -> PyResult<Bound<'_, PyAny>> {
    let report = py
        .detach(kdwit::case_studies::run_spin1_report)
        .map_err(err)?;
    serialize(py, &report)
}

#[pyfunction]
fn dft_matrix(d: usize) -> PyResult<PyTransition> {
    Ok(PyTransition(
        kdwit::case_studies::dft_matrix(d).map_err(err)?,
    ))
}

#[pyfunction]
fn haar_unitary(d: usize, seed: u64) -> PyResult<PyTransition> {
    let u = haar(d, seed).map_err(err)?;
    Ok(PyTransition(TransitionMatrix::new(u).map_err(err)?))
}

#[pyfunction]
fn haar_genericity_study(
    py: Python<'_>,
    dim: usize,
    samples: usize,
    seed: u64,
) -> PyResult<Bound<'_, PyAny>> {
    serialize(
        py,
        &kdwit::case_studies::haar_genericity_study(dim, samples, seed).map_err(err)?,
    )
}

#[pymodule]
fn kdwit_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyTransition>()?;
    m.add_class::<PyPure>()?;
    m.add_class::<PyDensity>()?;
    m.add_function(wrap_pyfunction!(kd_table, m)?)?;
    m.add_function(wrap_pyfunction!(total_nonpositivity, m)?)?;
    m.add_function(wrap_pyfunction!(is_kd_positive, m)?)?;
    m.add_function(wrap_pyfunction!(support_counts, m)?)?;
    m.add_function(wrap_pyfunction!(min_uncertainty_states, m)?)?;
    m.add_function(wrap_pyfunction!(kd_positive_pure_states, m)?)?;
    m.add_function(wrap_pyfunction!(membership, m)?)?;
    m.add_function(wrap_pyfunction!(facets, m)?)?;
    m.add_function(wrap_pyfunction!(support_roof_bounds, m)?)?;
    m.add_function(wrap_pyfunction!(nonpositivity_roof_bounds, m)?)?;
    m.add_function(wrap_pyfunction!(spin1_transition, m)?)?;
    m.add_function(wrap_pyfunction!(rho_lambda, m)?)?;
    m.add_function(wrap_pyfunction!(run_spin1_report, m)?)?;
    m.add_function(wrap_pyfunction!(dft_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(haar_unitary, m)?)?;
    m.add_function(wrap_pyfunction!(haar_genericity_study, m)?)?;
    Ok(())
}

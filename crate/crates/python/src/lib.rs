//! Python bindings: states, verdicts, decompositions, subgroup detection and
//! the overlap estimate. Structured results come back as plain dicts.

use entangprops::approx::{classify_separated_groups, log10_overlap, OrbitalModel, DEFAULT_THRESHOLD_LOG10};
use entangprops::cli::document::{document_for, parse_document};
use entangprops::cli::report::{ClassificationRecord, PropertiesRecord, SubgroupRecord};
use entangprops::decomp::{schmidt, slater, takagi, DecompositionSummary};
use entangprops::manybody::{detect_partition, embed_partition, one_rdm, opo_residual};
use entangprops::named::NamedState;
use entangprops::verdicts::{classify_pair, complete_property_witness, correlation_factorizes, property_report};
use entangprops::{antisymmetrize, make_factorized, symmetrize, CMatrix, CVector, Error, ModeSpace, Statistics, StateVector, Tolerances, C64};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyAny;
use serde::Serialize;

fn to_py_err(e: Error) -> PyErr {
    match e {
        Error::Consistency(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

/// Hand a serializable record to Python as a dict.
fn to_python<T: Serialize>(py: Python<'_>, value: &T) -> PyResult<Py<PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    Ok(py.import("json")?.call_method1("loads", (text,))?.unbind())
}

fn matrix(rows: Vec<Vec<C64>>) -> PyResult<CMatrix> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(PyValueError::new_err("expected a nonempty square list of rows"));
    }
    Ok(CMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

/// A normalized pure state of N particles.
#[pyclass(name = "StateVector", module = "entangprops_py", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyStateVector {
    inner: StateVector,
}

#[pymethods]
impl PyStateVector {
    /// Build from row-major amplitudes over `particles` copies of a
    /// `dim`-dimensional space.
    #[new]
    #[pyo3(signature = (amplitudes, particles, dim, statistics = "distinguishable"))]
    fn new(amplitudes: Vec<C64>, particles: usize, dim: usize, statistics: &str) -> PyResult<Self> {
        let stats: Statistics = statistics.parse().map_err(to_py_err)?;
        let space = ModeSpace::new(dim).map_err(to_py_err)?;
        let inner = StateVector::from_amplitudes(space, particles, amplitudes, stats).map_err(to_py_err)?;
        Ok(Self { inner })
    }

    /// `|v_0⟩ ⊗ … ⊗ |v_{N-1}⟩`, optionally (anti)symmetrized.
    #[staticmethod]
    #[pyo3(signature = (vectors, symmetry = None))]
    fn product(vectors: Vec<Vec<C64>>, symmetry: Option<&str>) -> PyResult<Self> {
        let factors: Vec<CVector> = vectors.into_iter().map(CVector::from_vec).collect();
        let state = make_factorized(&factors).map_err(to_py_err)?;
        let inner = match symmetry {
            None => state,
            Some("antisymmetric") => antisymmetrize(&state)
                .map_err(to_py_err)?
                .ok_or_else(|| PyValueError::new_err("the product is annihilated by antisymmetrization"))?,
            Some("symmetric") => symmetrize(&state).map_err(to_py_err)?,
            Some(other) => return Err(PyValueError::new_err(format!("unknown symmetry '{other}'"))),
        };
        Ok(Self { inner })
    }

    /// One of the reference states: "singlet", "localized-pair", "epr-pair".
    #[staticmethod]
    fn named(name: &str) -> PyResult<Self> {
        let n: NamedState = name.parse().map_err(to_py_err)?;
        Ok(Self { inner: n.build() })
    }

    /// Parse a JSON state document.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inner = parse_document(text).and_then(|d| d.to_state()).map_err(to_py_err)?;
        Ok(Self { inner })
    }

    fn to_json(&self) -> PyResult<String> {
        let doc = document_for(&self.inner).map_err(to_py_err)?;
        serde_json::to_string(&doc).map_err(|e| PyRuntimeError::new_err(e.to_string()))
    }

    fn with_statistics(&self, statistics: &str) -> PyResult<Self> {
        let stats: Statistics = statistics.parse().map_err(to_py_err)?;
        Ok(Self { inner: self.inner.with_statistics(stats).map_err(to_py_err)? })
    }

    #[getter]
    fn particles(&self) -> usize {
        self.inner.particles()
    }

    #[getter]
    fn dims(&self) -> Vec<usize> {
        self.inner.dims()
    }

    #[getter]
    fn statistics(&self) -> String {
        self.inner.statistics().to_string()
    }

    #[getter]
    fn amplitudes(&self) -> Vec<C64> {
        self.inner.amplitudes().to_vec()
    }

    fn __repr__(&self) -> String {
        format!("StateVector(particles={}, dims={:?}, statistics={})", self.inner.particles(), self.inner.dims(), self.inner.statistics())
    }
}

/// Entanglement verdict of a two-particle state, dispatched on statistics.
#[pyfunction]
#[pyo3(signature = (state, tol = None))]
fn classify(py: Python<'_>, state: &PyStateVector, tol: Option<f64>) -> PyResult<Py<PyAny>> {
    let tol = tol.map_or_else(Tolerances::default, Tolerances::with_rank);
    let verdict = classify_pair(&state.inner, &tol).map_err(to_py_err)?;
    let record = ClassificationRecord::new(state.inner.statistics().to_string(), &verdict, None);
    let out = to_python(py, &record)?;
    out.bind(py).set_item("diagnostics", to_python(py, &verdict.diagnostics)?)?;
    Ok(out)
}

/// Property level and statements for the particle in `slot`.
#[pyfunction]
#[pyo3(signature = (state, slot = 0))]
fn properties(py: Python<'_>, state: &PyStateVector, slot: usize) -> PyResult<Py<PyAny>> {
    let r = property_report(&state.inner, slot).map_err(to_py_err)?;
    to_python(py, &PropertiesRecord::from(&r))
}

/// `(residual, factorizes)` for `⟨A⊗B⟩` against `⟨A⊗I⟩⟨I⊗B⟩`.
#[pyfunction]
#[pyo3(signature = (state, a, b, tol = 1e-10))]
fn correlation(state: &PyStateVector, a: Vec<Vec<C64>>, b: Vec<Vec<C64>>, tol: f64) -> PyResult<(f64, bool)> {
    let c = correlation_factorizes(&state.inner, &matrix(a)?, &matrix(b)?, tol).map_err(to_py_err)?;
    Ok((c.residual, c.factorizes))
}

/// Vector of a rank-1 projector with unit `E(1,2)` expectation, or None.
#[pyfunction]
fn property_witness(state: &PyStateVector) -> PyResult<Option<Vec<C64>>> {
    let w = complete_property_witness(&state.inner).map_err(to_py_err)?;
    Ok(w.map(|w| w.vector.iter().copied().collect()))
}

/// Schmidt, Slater or Takagi decomposition of a pair.
#[pyfunction]
fn decompose(py: Python<'_>, state: &PyStateVector, kind: &str) -> PyResult<Py<PyAny>> {
    let summary = match kind {
        "schmidt" => DecompositionSummary::from(&schmidt(&state.inner).map_err(to_py_err)?),
        "slater" => DecompositionSummary::from(&slater(&state.inner).map_err(to_py_err)?),
        "takagi" => DecompositionSummary::from(&takagi(&state.inner).map_err(to_py_err)?),
        other => return Err(PyValueError::new_err(format!("unknown decomposition '{other}'"))),
    };
    to_python(py, &summary)
}

#[pyfunction]
fn opo(sigma: &PyStateVector, phi: &PyStateVector) -> PyResult<f64> {
    opo_residual(&sigma.inner, &phi.inner).map_err(to_py_err)
}

/// Eigenvalues of the one-body density matrix (trace N), descending.
#[pyfunction]
fn occupations(state: &PyStateVector) -> PyResult<Vec<f64>> {
    Ok(one_rdm(&state.inner).map_err(to_py_err)?.spectrum().0)
}

#[pyfunction]
fn embed(pi: &PyStateVector, phi: &PyStateVector) -> PyResult<PyStateVector> {
    Ok(PyStateVector { inner: embed_partition(&pi.inner, &phi.inner).map_err(to_py_err)? })
}

/// Subgroup factorization into M and N−M fermions, as a dict.
#[pyfunction]
fn subgroup(py: Python<'_>, state: &PyStateVector, m: usize) -> PyResult<Py<PyAny>> {
    let found = detect_partition(&state.inner, m).map_err(to_py_err)?;
    to_python(py, &SubgroupRecord::new(m, state.inner.particles() - m, found.as_ref()))
}

/// `log₁₀` of the overlap of two exponential orbitals.
#[pyfunction]
fn overlap_log10(separation: f64, decay_length: f64) -> PyResult<f64> {
    log10_overlap(&OrbitalModel::new(decay_length, separation).map_err(to_py_err)?).map_err(to_py_err)
}

#[pyfunction]
#[pyo3(signature = (separation, decay_length, threshold = DEFAULT_THRESHOLD_LOG10))]
fn separated(py: Python<'_>, separation: f64, decay_length: f64, threshold: f64) -> PyResult<Py<PyAny>> {
    let model = OrbitalModel::new(decay_length, separation).map_err(to_py_err)?;
    to_python(py, &classify_separated_groups(&model, threshold).map_err(to_py_err)?)
}

#[pymodule]
pub fn entangprops_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyStateVector>()?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(properties, m)?)?;
    m.add_function(wrap_pyfunction!(correlation, m)?)?;
    m.add_function(wrap_pyfunction!(property_witness, m)?)?;
    m.add_function(wrap_pyfunction!(decompose, m)?)?;
    m.add_function(wrap_pyfunction!(opo, m)?)?;
    m.add_function(wrap_pyfunction!(occupations, m)?)?;
    m.add_function(wrap_pyfunction!(embed, m)?)?;
    m.add_function(wrap_pyfunction!(subgroup, m)?)?;
    m.add_function(wrap_pyfunction!(overlap_log10, m)?)?;
    m.add_function(wrap_pyfunction!(separated, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}

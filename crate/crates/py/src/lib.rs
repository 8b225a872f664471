//! Python bindings. Complex numbers cross the boundary as Python `complex`;
//! vectors are lists and matrices are lists of rows.

use gurlab::explorer::{
    probe_achievability, scan_grid, spin_demo as run_spin_demo, GridSpec, Pauli, ProbeConfig, SpinDemoConfig,
    SpinRow, DEFAULT_PROBE_DIMS, DEFAULT_PROBE_TOL, DEFAULT_SCAN_TOL,
};
use gurlab::hilbert::psd_check_matrix;
use gurlab::{
    CMatrix, DensityMatrix, MomentSet, Observable, PsdVerdict, StateVector, Tolerance, VectorSet, C64, DEFAULT_TOL,
};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

type Rows = Vec<Vec<C64>>;
type ScanRow = (f64, f64, f64, f64, f64, &'static str);

fn err(e: gurlab::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_matrix(rows: &Rows) -> PyResult<CMatrix> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(PyValueError::new_err("expected a nonempty square matrix (list of rows)"));
    }
    Ok(CMatrix::from_fn(n, n, |r, c| rows[r][c]))
}

fn from_matrix(m: &CMatrix) -> Rows {
    (0..m.nrows()).map(|r| (0..m.ncols()).map(|c| m[(r, c)]).collect()).collect()
}

fn vector_set(vectors: Vec<Vec<C64>>) -> PyResult<VectorSet> {
    let vs = vectors.into_iter().map(|v| StateVector::new(v).map_err(err)).collect::<PyResult<Vec<_>>>()?;
    VectorSet::new(vs).map_err(err)
}

/// Outcome of one inequality check; `margin = lhs - rhs`.
#[pyclass(name = "RelationReport", module = "gurlab", frozen, get_all, skip_from_py_object)]
#[derive(Clone)]
struct PyRelationReport {
    relation: String,
    lhs: f64,
    rhs: f64,
    margin: f64,
    satisfied: bool,
    saturated: bool,
    tol: f64,
    saturation_tol: f64,
    degenerate: bool,
}

#[pymethods]
impl PyRelationReport {
    fn __repr__(&self) -> String {
        format!(
            "RelationReport(relation='{}', margin={:e}, satisfied={}, saturated={})",
            self.relation,
            self.margin,
            if self.satisfied { "True" } else { "False" },
            if self.saturated { "True" } else { "False" }
        )
    }
}

impl From<gurlab::RelationReport> for PyRelationReport {
    fn from(r: gurlab::RelationReport) -> Self {
        Self {
            relation: r.relation.name().to_string(),
            lhs: r.lhs,
            rhs: r.rhs,
            margin: r.margin,
            satisfied: r.satisfied,
            saturated: r.saturated,
            tol: r.tol,
            saturation_tol: r.saturation_tol,
            degenerate: r.degenerate,
        }
    }
}

fn report(r: gurlab::Result<gurlab::RelationReport>) -> PyResult<PyRelationReport> {
    r.map(Into::into).map_err(err)
}

fn verdict_dict<'py>(py: Python<'py>, v: &PsdVerdict) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("is_psd", v.is_psd)?;
    d.set_item("min_eigenvalue", v.min_eigenvalue)?;
    d.set_item("worst_minor", v.worst_minor)?;
    d.set_item("worst_minor_rows", v.worst_minor_rows.clone())?;
    d.set_item("minors_nonnegative", v.minors_nonnegative)?;
    Ok(d)
}

/// Dispersions and correlators of a list of observables.
#[pyclass(name = "MomentSet", module = "gurlab", frozen)]
struct PyMomentSet {
    inner: MomentSet,
}

#[pymethods]
impl PyMomentSet {
    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn sigma2(&self) -> Vec<f64> {
        self.inner.sigma2.clone()
    }

    #[getter]
    fn means(&self) -> Vec<f64> {
        self.inner.means.clone()
    }

    /// Correlator matrix; the diagonal holds the dispersions.
    #[getter]
    fn corr(&self) -> Rows {
        from_matrix(&self.inner.corr)
    }

    /// Normalized correlations `rho`, phases `phi`, and the cyclic phase sum
    /// (three observables only).
    fn normalized<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let nc = gurlab::normalized_correlations(&self.inner);
        let n = self.inner.n();
        let grid = |f: &dyn Fn(usize, usize) -> f64| -> Vec<Vec<f64>> {
            (0..n).map(|i| (0..n).map(|j| f(i, j)).collect()).collect()
        };
        let d = PyDict::new(py);
        d.set_item("rho", grid(&|i, j| nc.rho[(i, j)]))?;
        d.set_item("phi", grid(&|i, j| nc.phi[(i, j)]))?;
        d.set_item("sigma_sum", nc.sigma_sum)?;
        d.set_item("cos_sigma", nc.cos_sigma())?;
        d.set_item("degenerate", nc.any_degenerate())?;
        Ok(d)
    }

    fn __repr__(&self) -> String {
        format!("MomentSet(n={}, sigma2={:?})", self.inner.n(), self.inner.sigma2)
    }
}

/// Moments from a pure `state` or a `density` matrix (exactly one).
#[pyfunction]
#[pyo3(signature = (observables, state=None, density=None, tol=DEFAULT_TOL))]
fn moments(observables: Vec<Rows>, state: Option<Vec<C64>>, density: Option<Rows>, tol: f64) -> PyResult<PyMomentSet> {
    let obs = observables
        .iter()
        .map(|rows| Observable::with_tolerance(to_matrix(rows)?, tol).map_err(err))
        .collect::<PyResult<Vec<_>>>()?;
    let inner = match (state, density) {
        (Some(s), None) => gurlab::moments_from_state(&obs, &StateVector::new(s).map_err(err)?, None),
        (None, Some(w)) => {
            gurlab::moments_from_density(&obs, &DensityMatrix::with_tolerance(to_matrix(&w)?, tol).map_err(err)?)
        }
        _ => return Err(PyValueError::new_err("pass exactly one of state= or density=")),
    }
    .map_err(err)?;
    Ok(PyMomentSet { inner })
}

#[pyfunction]
#[pyo3(signature = (m, i, j, tol=DEFAULT_TOL))]
fn heisenberg(m: &PyMomentSet, i: usize, j: usize, tol: f64) -> PyResult<PyRelationReport> {
    report(gurlab::heisenberg_pair(&m.inner, i, j, Tolerance::new(tol)))
}

#[pyfunction]
#[pyo3(signature = (m, i, j, tol=DEFAULT_TOL))]
fn schroedinger(m: &PyMomentSet, i: usize, j: usize, tol: f64) -> PyResult<PyRelationReport> {
    report(gurlab::schroedinger_pair(&m.inner, i, j, Tolerance::new(tol)).map(|s| s.report))
}

#[pyfunction]
#[pyo3(signature = (m, tol=DEFAULT_TOL))]
fn gur_raw(m: &PyMomentSet, tol: f64) -> PyResult<PyRelationReport> {
    report(gurlab::gur_raw(&m.inner, Tolerance::new(tol)))
}

/// Determinant check of the full moment matrix; returns `(report, verdict)`.
#[pyfunction]
#[pyo3(signature = (m, tol=DEFAULT_TOL))]
fn gur_n<'py>(py: Python<'py>, m: &PyMomentSet, tol: f64) -> PyResult<(PyRelationReport, Bound<'py, PyDict>)> {
    let (r, v) = gurlab::gur_n(&m.inner, Tolerance::new(tol)).map_err(err)?;
    Ok((r.into(), verdict_dict(py, &v)?))
}

#[pyfunction]
#[pyo3(signature = (rho12, rho23, rho31, cos_sigma, tol=DEFAULT_TOL))]
fn gur_normalized(rho12: f64, rho23: f64, rho31: f64, cos_sigma: f64, tol: f64) -> PyResult<PyRelationReport> {
    let p = gurlab::RhoSigmaPoint::new(rho12, rho23, rho31, cos_sigma).map_err(err)?;
    report(gurlab::gur_normalized(&p, Tolerance::new(tol)))
}

#[pyfunction]
#[pyo3(signature = (rho12, rho23, rho31, tol=DEFAULT_TOL))]
fn gur_weakened(rho12: f64, rho23: f64, rho31: f64, tol: f64) -> PyResult<PyRelationReport> {
    report(gurlab::gur_weakened(rho12, rho23, rho31, Tolerance::new(tol)))
}

#[pyfunction]
fn forbidden_region(rho12: f64, rho23: f64, rho31: f64) -> bool {
    gurlab::forbidden_region_check(rho12, rho23, rho31)
}

#[pyfunction]
#[pyo3(signature = (rho12, rho31, tol=DEFAULT_TOL))]
fn orthogonal_special(rho12: f64, rho31: f64, tol: f64) -> PyResult<PyRelationReport> {
    report(gurlab::orthogonal_special(rho12, rho31, Tolerance::new(tol)))
}

#[pyfunction]
fn gram_matrix(vectors: Vec<Vec<C64>>) -> PyResult<Rows> {
    Ok(from_matrix(gurlab::gram_matrix(&vector_set(vectors)?).matrix()))
}

#[pyfunction]
#[pyo3(signature = (matrix, tol=DEFAULT_TOL))]
fn psd_check<'py>(py: Python<'py>, matrix: Rows, tol: f64) -> PyResult<Bound<'py, PyDict>> {
    let v = psd_check_matrix(&to_matrix(&matrix)?, tol).map_err(err)?;
    verdict_dict(py, &v)
}

#[pyfunction]
#[pyo3(signature = (vectors, tol=DEFAULT_TOL))]
fn linear_dependence(vectors: Vec<Vec<C64>>, tol: f64) -> PyResult<bool> {
    Ok(gurlab::linear_dependence_check(&vector_set(vectors)?, tol))
}

#[pyfunction]
#[pyo3(signature = (vectors, i, j, tol=DEFAULT_TOL))]
fn cauchy_pair(vectors: Vec<Vec<C64>>, i: usize, j: usize, tol: f64) -> PyResult<PyRelationReport> {
    report(gurlab::cauchy_pair(&vector_set(vectors)?, i, j, Tolerance::new(tol)))
}

#[pyfunction]
#[pyo3(signature = (vectors, tol=DEFAULT_TOL))]
fn gci_triple(vectors: Vec<Vec<C64>>, tol: f64) -> PyResult<PyRelationReport> {
    report(gurlab::gci_triple(&vector_set(vectors)?, Tolerance::new(tol)))
}

/// Classified grid over `(rho12, rho23, rho31, Sigma)`; rows are
/// `(rho12, rho23, rho31, cos_sigma, margin, class)`.
#[pyfunction]
#[pyo3(signature = (rho_steps=21, sigma_steps=13, tol=DEFAULT_SCAN_TOL))]
fn scan(rho_steps: usize, sigma_steps: usize, tol: f64) -> PyResult<Vec<ScanRow>> {
    let g = GridSpec::new(rho_steps, sigma_steps).map_err(err)?;
    Ok(scan_grid(&g, tol)
        .map_err(err)?
        .into_iter()
        .map(|c| {
            let p = c.point;
            (p.rho12, p.rho23, p.rho31, p.cos_sigma, c.margin, c.class.as_str())
        })
        .collect())
}

#[pyfunction]
#[pyo3(signature = (target, budget=100_000, seed=0, dims=None, tol=DEFAULT_PROBE_TOL))]
fn probe<'py>(
    py: Python<'py>,
    target: [f64; 3],
    budget: u64,
    seed: u64,
    dims: Option<Vec<usize>>,
    tol: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let dims = dims.unwrap_or_else(|| DEFAULT_PROBE_DIMS.to_vec());
    let config = ProbeConfig {
        tol,
        ..ProbeConfig::default()
    };
    let r = py
        .detach(|| probe_achievability(target, &dims, budget, seed, &config))
        .map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("reached", r.reached)?;
    d.set_item("best_distance", r.best_distance)?;
    d.set_item("best_rho", r.best_point.map(|p| p.rhos()))?;
    d.set_item("trials", r.trials)?;
    d.set_item("violations", r.violations)?;
    d.set_item("forbidden_hits", r.forbidden_hits)?;
    d.set_item("degenerate_trials", r.degenerate_trials)?;
    d.set_item("seed", r.seed)?;
    Ok(d)
}

fn spin_row<'py>(py: Python<'py>, r: &SpinRow) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("rho", [r.rho12, r.rho23, r.rho31])?;
    d.set_item("cos_sigma", r.cos_sigma)?;
    d.set_item("margin", r.margin)?;
    d.set_item("satisfied", r.satisfied)?;
    d.set_item("degenerate", r.degenerate)?;
    Ok(d)
}

/// Three-spin demonstration: GHZ and product presets plus random states.
#[pyfunction]
#[pyo3(signature = (trials=10_000, seed=0, projections="xxx"))]
fn spin_demo<'py>(py: Python<'py>, trials: usize, seed: u64, projections: &str) -> PyResult<Bound<'py, PyDict>> {
    let p: Vec<Pauli> = projections
        .chars()
        .map(|c| c.to_string().parse::<Pauli>().map_err(err))
        .collect::<PyResult<_>>()?;
    let projections: [Pauli; 3] = p
        .try_into()
        .map_err(|_| PyValueError::new_err("projections must name three Pauli axes, e.g. 'xxz'"))?;
    let config = SpinDemoConfig {
        seed,
        trials,
        projections,
        ..SpinDemoConfig::default()
    };
    let rep = py.detach(|| run_spin_demo(&config)).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("ghz", spin_row(py, &rep.ghz)?)?;
    d.set_item("product", spin_row(py, &rep.product)?)?;
    d.set_item("trials", rep.samples.len())?;
    d.set_item("violations", rep.violations)?;
    d.set_item("forbidden_hits", rep.forbidden_hits)?;
    d.set_item("degenerate", rep.degenerate)?;
    Ok(d)
}

#[pymodule]
#[pyo3(name = "gurlab")]
fn gurlab_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("DEFAULT_TOL", DEFAULT_TOL)?;
    m.add_class::<PyMomentSet>()?;
    m.add_class::<PyRelationReport>()?;
    m.add_function(wrap_pyfunction!(moments, m)?)?;
    m.add_function(wrap_pyfunction!(heisenberg, m)?)?;
    m.add_function(wrap_pyfunction!(schroedinger, m)?)?;
    m.add_function(wrap_pyfunction!(gur_raw, m)?)?;
    m.add_function(wrap_pyfunction!(gur_n, m)?)?;
    m.add_function(wrap_pyfunction!(gur_normalized, m)?)?;
    m.add_function(wrap_pyfunction!(gur_weakened, m)?)?;
    m.add_function(wrap_pyfunction!(forbidden_region, m)?)?;
    m.add_function(wrap_pyfunction!(orthogonal_special, m)?)?;
    m.add_function(wrap_pyfunction!(gram_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(psd_check, m)?)?;
    m.add_function(wrap_pyfunction!(linear_dependence, m)?)?;
    m.add_function(wrap_pyfunction!(cauchy_pair, m)?)?;
    m.add_function(wrap_pyfunction!(gci_triple, m)?)?;
    m.add_function(wrap_pyfunction!(scan, m)?)?;
    m.add_function(wrap_pyfunction!(probe, m)?)?;
    m.add_function(wrap_pyfunction!(spin_demo, m)?)?;
    Ok(())
}

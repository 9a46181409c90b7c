use gapspec_core::matpoly::{self, MatrixPolynomial, PseudospectraWeights, QuadraticPencil, Rect};
use gapspec_core::operators::{OperatorModel, Potential};
use gapspec_core::pipeline::{self, PerturbationSpec, DEFAULT_EPS_FRACTION};
use gapspec_core::{CMatrix, Error, C64};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn to_py(e: Error) -> PyErr {
    if e.is_config() {
        PyValueError::new_err(e.to_string())
    } else {
        PyRuntimeError::new_err(e.to_string())
    }
}

fn rows(a: &CMatrix) -> Vec<Vec<C64>> {
    a.outer_iter().map(|r| r.to_vec()).collect()
}

/// An operator model that can be truncated to a quadratic pencil.
#[pyclass(name = "Model", frozen)]
struct PyModel {
    inner: OperatorModel,
}

#[pymethods]
impl PyModel {
    #[staticmethod]
    fn fourier_b1() -> Self {
        Self {
            inner: OperatorModel::FourierB1,
        }
    }

    #[staticmethod]
    fn direct_sum_b2() -> Self {
        Self {
            inner: OperatorModel::DirectSumB2,
        }
    }

    /// `−∂² + V` in Hermite functions with
    /// `V(x) = −depth·exp(−(x/width)²) + amplitude·cos(frequency·x)`.
    /// Without arguments this is the demo potential `−8e^{−x²} + cos x`.
    #[staticmethod]
    #[pyo3(signature = (depth=8.0, width=1.0, amplitude=1.0, frequency=1.0, quadrature_nodes=None))]
    fn schrodinger(
        depth: f64,
        width: f64,
        amplitude: f64,
        frequency: f64,
        quadrature_nodes: Option<usize>,
    ) -> PyResult<Self> {
        let inner = OperatorModel::SchrodingerHermite {
            potential: Potential::WellPlusPeriodic {
                depth,
                width,
                amplitude,
                frequency,
            },
            quadrature_nodes,
        };
        inner.validate().map_err(to_py)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn harmonic() -> Self {
        Self {
            inner: OperatorModel::HarmonicSanity,
        }
    }

    #[staticmethod]
    fn shift_fixture() -> Self {
        Self {
            inner: OperatorModel::ShiftFixture,
        }
    }

    #[getter]
    fn name(&self) -> &'static str {
        self.inner.name()
    }

    fn dim(&self, n: usize) -> usize {
        self.inner.dim(n)
    }

    /// `(M_n, [M²]_n)` as nested lists of complex numbers.
    fn truncation(&self, py: Python<'_>, n: usize) -> PyResult<(Vec<Vec<C64>>, Vec<Vec<C64>>)> {
        let pair = py.detach(|| self.inner.truncation(n)).map_err(to_py)?;
        Ok((rows(pair.m.as_array()), rows(pair.m2.as_array())))
    }

    fn pencil(&self, py: Python<'_>, n: usize) -> PyResult<PyPencil> {
        let inner = py.detach(|| self.inner.pencil(n)).map_err(to_py)?;
        Ok(PyPencil { inner })
    }

    fn __repr__(&self) -> String {
        format!("Model({:?})", self.inner)
    }
}

/// `P(z) = z² − B z + C` with Hermitian `B`, `C`.
#[pyclass(name = "Pencil", frozen)]
struct PyPencil {
    inner: QuadraticPencil,
}

#[pymethods]
impl PyPencil {
    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn evaluate(&self, z: C64) -> Vec<Vec<C64>> {
        rows(&self.inner.evaluate(z))
    }

    /// All `2·dim` eigenvalues, sorted by real then imaginary part.
    fn eigenvalues(&self, py: Python<'_>) -> PyResult<Vec<C64>> {
        py.detach(|| matpoly::eigenvalues_only(&self.inner)).map_err(to_py)
    }

    /// `(eigenvalues, residuals)`.
    fn eigenpairs_residuals(&self, py: Python<'_>) -> PyResult<(Vec<C64>, Vec<f64>)> {
        let s = py.detach(|| matpoly::eigenvalues(&self.inner)).map_err(to_py)?;
        Ok((s.eigenvalues, s.residuals))
    }

    fn spectral_function(&self, z: C64) -> PyResult<f64> {
        matpoly::spectral_function(&self.inner, z).map_err(to_py)
    }

    /// Rank-one `E` of norm `σ_P(z)` with `P(z) + E` singular.
    fn witness(&self, z: C64) -> PyResult<Vec<Vec<C64>>> {
        matpoly::rank_one_distance_witness(&self.inner, z)
            .map(|e| rows(&e))
            .map_err(to_py)
    }

    fn pseudospectrum_member(&self, z: C64, eps: f64, weights: Vec<f64>) -> PyResult<bool> {
        let w = PseudospectraWeights::new(weights).map_err(to_py)?;
        matpoly::pseudospectrum_member(&self.inner, z, eps, &w).map_err(to_py)
    }

    /// Spectral function at cell centres; `result[j][i]` belongs to column
    /// `i` and row `j` counted from `(re_min, im_min)`.
    #[allow(clippy::too_many_arguments)]
    fn grid_sample(
        &self,
        py: Python<'_>,
        re_min: f64,
        re_max: f64,
        im_min: f64,
        im_max: f64,
        nx: usize,
        ny: usize,
    ) -> PyResult<Vec<Vec<f64>>> {
        let rect = Rect::new(re_min, re_max, im_min, im_max).map_err(to_py)?;
        let grid = py.detach(|| matpoly::grid_sample(&self.inner, rect, nx, ny)).map_err(to_py)?;
        Ok((0..ny).map(|j| (0..nx).map(|i| grid.value(i, j)).collect()).collect())
    }
}

/// `(λ₋, λ₊)`: the eigenvalue in the gap and the one above the bands.
#[pyfunction]
fn secular_roots() -> PyResult<(f64, f64)> {
    let s = gapspec_core::oracle::secular_roots().map_err(to_py)?;
    Ok((s.lambda_minus, s.lambda_plus))
}

#[pyfunction]
#[pyo3(signature = (eigenvalues, imag_cut=f64::INFINITY))]
fn enclosures(eigenvalues: Vec<C64>, imag_cut: f64) -> PyResult<Vec<(f64, f64)>> {
    Ok(pipeline::enclosures(&eigenvalues, imag_cut)
        .map_err(to_py)?
        .into_iter()
        .map(|e| (e.lo, e.hi))
        .collect())
}

#[pyfunction]
fn nearest_eigenvalue(eigenvalues: Vec<C64>, target: f64) -> PyResult<C64> {
    pipeline::nearest_eigenvalue(&eigenvalues, target).map_err(to_py)
}

/// One dict per truncation with keys `n, z, err, log_err, log_n, slope,
/// residual`.
#[pyfunction]
fn convergence_study<'py>(
    py: Python<'py>,
    model: &PyModel,
    reference: f64,
    ns: Vec<usize>,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let records = py
        .detach(|| pipeline::convergence_study(&model.inner, reference, &ns))
        .map_err(to_py)?;
    records
        .iter()
        .map(|r| {
            let d = PyDict::new(py);
            d.set_item("n", r.n)?;
            d.set_item("z", r.z)?;
            d.set_item("err", r.err)?;
            d.set_item("log_err", r.log_err)?;
            d.set_item("log_n", r.log_n)?;
            d.set_item("slope", r.slope)?;
            d.set_item("residual", r.residual)?;
            Ok(d)
        })
        .collect()
}

#[pyfunction]
fn tolerance_bound(delta: f64, mu: f64, lam: f64, w0: f64, w1: f64) -> PyResult<f64> {
    pipeline::tolerance_bound(delta, mu, lam, w0, w1).map_err(to_py)
}

/// Seeded random coefficient perturbations near `lam`; returns a summary
/// dict.
#[pyfunction]
#[pyo3(signature = (model, n, lam, delta, w0, w1, trials, seed=0, eps_fraction=DEFAULT_EPS_FRACTION))]
#[allow(clippy::too_many_arguments)]
fn perturbation_experiment<'py>(
    py: Python<'py>,
    model: &PyModel,
    n: usize,
    lam: f64,
    delta: f64,
    w0: f64,
    w1: f64,
    trials: usize,
    seed: u64,
    eps_fraction: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let spec = PerturbationSpec {
        n,
        lambda: lam,
        delta,
        w0,
        w1,
        trials,
        seed,
        eps_fraction,
    };
    let r = py
        .detach(|| pipeline::perturbation_experiment(&model.inner, &spec))
        .map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("mu", r.mu)?;
    d.set_item("eps_bound", r.eps_bound)?;
    d.set_item("eps", r.eps)?;
    d.set_item("unperturbed_count", r.unperturbed_count)?;
    d.set_item("unperturbed_annulus_clear", r.unperturbed_annulus_clear)?;
    d.set_item("counts", r.outcomes.iter().map(|o| o.count_in_disk).collect::<Vec<_>>())?;
    d.set_item("all_counts_match", r.all_counts_match())?;
    d.set_item("all_annulus_clear", r.all_annulus_clear())?;
    Ok(d)
}

#[pymodule]
fn gapspec(m: &Bound<'_, PyModule>) -> PyResult<()> {
    gapspec_core::linalg::pin_blas_threads();
    m.add_class::<PyModel>()?;
    m.add_class::<PyPencil>()?;
    m.add_function(wrap_pyfunction!(secular_roots, m)?)?;
    m.add_function(wrap_pyfunction!(enclosures, m)?)?;
    m.add_function(wrap_pyfunction!(nearest_eigenvalue, m)?)?;
    m.add_function(wrap_pyfunction!(convergence_study, m)?)?;
    m.add_function(wrap_pyfunction!(tolerance_bound, m)?)?;
    m.add_function(wrap_pyfunction!(perturbation_experiment, m)?)?;
    Ok(())
}

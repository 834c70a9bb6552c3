//! Python module `cmvscat`: Verblunsky data, scattering functions, the
//! inverse problem, operator checks and class diagnostics.

use cmv_scattering::circle::GridFunction;
use cmv_scattering::classes::{self, ClassInput, ClassifyOptions};
use cmv_scattering::cmv;
use cmv_scattering::generators;
use cmv_scattering::operators::{self, Basis};
use cmv_scattering::scattering::{self, DEFAULT_SIZES, DEFAULT_TAU_HI, DEFAULT_TAU_LO};
use cmv_scattering::schur;
use cmv_scattering::schur::VerblunskyData as Data;
use cmv_scattering::Error;
use nalgebra::DMatrix;
use num_complex::Complex64;
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;
use serde::Serialize;

create_exception!(cmvscat, CmvError, PyValueError);
create_exception!(cmvscat, NonCanonicalError, CmvError);

const DEFAULT_GRID: usize = cmv_scattering::circle::DEFAULT_GRID;

fn raise(e: Error) -> PyErr {
    match e {
        Error::NonCanonical(_) | Error::Undecided(_) => NonCanonicalError::new_err(e.to_string()),
        other => CmvError::new_err(other.to_string()),
    }
}

fn grid(samples: Vec<Complex64>) -> PyResult<GridFunction> {
    GridFunction::new(samples).map_err(raise)
}

fn rows(m: &DMatrix<Complex64>) -> Vec<Vec<Complex64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

/// Serializable reports cross into Python as plain dicts and lists.
fn to_py<T: Serialize>(py: Python<'_>, value: &T) -> PyResult<Py<PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| CmvError::new_err(e.to_string()))?;
    Ok(py.import("json")?.call_method1("loads", (text,))?.unbind())
}

/// Finitely supported Verblunsky coefficients with the unimodular anchor `alpha_minus_one`.
#[pyclass(
    name = "VerblunskyData",
    module = "cmvscat",
    frozen,
    skip_from_py_object
)]
#[derive(Clone)]
struct PyData(Data);

#[pymethods]
impl PyData {
    #[new]
    #[pyo3(signature = (alphas, alpha_minus_one = Complex64::new(-1.0, 0.0)))]
    fn new(alphas: Vec<Complex64>, alpha_minus_one: Complex64) -> PyResult<Self> {
        Data::new(alpha_minus_one, alphas)
            .map(PyData)
            .map_err(raise)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Data::from_json(text)
            .map(PyData)
            .map_err(|e| CmvError::new_err(e.to_string()))
    }

    fn to_json(&self) -> String {
        self.0.to_json()
    }

    #[getter]
    fn alpha_minus_one(&self) -> Complex64 {
        self.0.alpha_minus_one()
    }

    #[getter]
    fn alphas(&self) -> Vec<Complex64> {
        self.0.alphas().to_vec()
    }

    #[getter]
    fn n_supp(&self) -> usize {
        self.0.n_supp()
    }

    fn rho(&self, k: usize) -> f64 {
        self.0.rho(k)
    }

    fn schur_parameters(&self) -> Vec<Complex64> {
        self.0.schur_parameters()
    }

    fn __len__(&self) -> usize {
        self.0.n_supp()
    }

    fn __repr__(&self) -> String {
        format!(
            "VerblunskyData(alphas={:?}, alpha_minus_one={})",
            self.0.alphas(),
            self.0.alpha_minus_one()
        )
    }
}

/// Scattering function of finitely supported data, with its spectral side.
#[pyclass(name = "ScatteringData", module = "cmvscat", frozen)]
struct PyScattering(scattering::ScatteringData);

#[pymethods]
impl PyScattering {
    #[getter]
    fn s(&self) -> Vec<Complex64> {
        self.0.s.samples().to_vec()
    }

    #[getter]
    fn index(&self) -> i64 {
        self.0.index
    }

    #[getter]
    fn w(&self) -> Vec<f64> {
        self.0.spectral.w.real_parts()
    }

    #[getter]
    fn d(&self) -> Vec<Complex64> {
        self.0.spectral.d_samples.samples().to_vec()
    }

    #[getter]
    fn alpha_minus_one(&self) -> Complex64 {
        self.0.spectral.alpha_minus_one
    }

    /// Fourier coefficient `ŝ(n)`.
    fn coefficient(&self, n: i64) -> Complex64 {
        self.0.shat.coeff(n)
    }

    /// Taylor coefficient of the Szegő function `D`.
    fn d_coefficient(&self, n: i64) -> Complex64 {
        self.0.spectral.d.coeff(n)
    }
}

/// Outcome of the inverse problem.
#[pyclass(name = "InverseResult", module = "cmvscat", frozen)]
struct PyInverse(scattering::InverseResult);

#[pymethods]
impl PyInverse {
    #[getter]
    fn data(&self) -> PyData {
        PyData(self.0.data.clone())
    }

    #[getter]
    fn match_error(&self) -> f64 {
        self.0.match_error
    }

    #[getter]
    fn w(&self) -> Vec<f64> {
        self.0.spectral.w.real_parts()
    }

    #[getter]
    fn degeneracy(&self) -> Option<(usize, f64)> {
        self.0.degeneracy
    }

    /// Canonicity report, `None` when the test was skipped.
    #[getter]
    fn report(&self, py: Python<'_>) -> PyResult<Option<Py<PyAny>>> {
        self.0.report.as_ref().map(|r| to_py(py, r)).transpose()
    }
}

#[pyfunction]
fn jacobi(gamma1: f64, gamma2: f64, count: usize) -> PyResult<PyData> {
    generators::jacobi(gamma1, gamma2, count)
        .map(PyData)
        .map_err(raise)
}

#[pyfunction]
fn bernstein(a: Complex64) -> PyResult<PyData> {
    generators::bernstein(a).map(PyData).map_err(raise)
}

#[pyfunction]
fn geometric(ratio: f64, count: usize) -> PyResult<PyData> {
    generators::geometric(ratio, count)
        .map(PyData)
        .map_err(raise)
}

/// Closed-form data for the weight `c|P|²` with roots on the circle.
#[pyfunction]
#[pyo3(signature = (roots, alpha_minus_one = Complex64::new(-1.0, 0.0), m = DEFAULT_GRID))]
fn polyweight(
    py: Python<'_>,
    roots: Vec<Complex64>,
    alpha_minus_one: Complex64,
    m: usize,
) -> PyResult<Py<PyDict>> {
    let p = generators::polyweight(&roots, alpha_minus_one, m).map_err(raise)?;
    let out = PyDict::new(py);
    out.set_item("poly", p.poly)?;
    out.set_item("scale", p.scale)?;
    out.set_item("d_taylor", p.d_taylor)?;
    out.set_item("w", p.w.real_parts())?;
    out.set_item("s", p.s.samples().to_vec())?;
    out.set_item("index", p.index)?;
    out.set_item("alpha_minus_one", p.alpha_minus_one)?;
    Ok(out.unbind())
}

/// `w`, `s` and `alpha_minus_one` from real `u`, `v` with `sup v - inf v < pi`.
#[pyfunction]
#[pyo3(signature = (u, v, c = Complex64::new(1.0, 0.0)))]
fn hs_generator(py: Python<'_>, u: Vec<f64>, v: Vec<f64>, c: Complex64) -> PyResult<Py<PyDict>> {
    let real = |x: Vec<f64>| grid(x.into_iter().map(|r| Complex64::new(r, 0.0)).collect());
    let out = classes::hs_generator(&real(u)?, &real(v)?, c).map_err(raise)?;
    let d = PyDict::new(py);
    d.set_item("w", out.w.real_parts())?;
    d.set_item("s", out.s.samples().to_vec())?;
    d.set_item("alpha_minus_one", out.alpha_minus_one)?;
    Ok(d.unbind())
}

/// `φ` on the `m`-point grid.
#[pyfunction]
#[pyo3(signature = (v, m = DEFAULT_GRID))]
fn schur_inverse(v: PyRef<'_, PyData>, m: usize) -> PyResult<Vec<Complex64>> {
    schur::schur_inverse(&v.0, m)
        .map(|f| f.samples().to_vec())
        .map_err(raise)
}

/// Verblunsky data read off grid samples of `φ`, with the degeneracy marker.
#[pyfunction]
#[pyo3(signature = (phi, depth, alpha_minus_one = Complex64::new(-1.0, 0.0)))]
fn schur_forward(
    phi: Vec<Complex64>,
    depth: usize,
    alpha_minus_one: Complex64,
) -> PyResult<(PyData, Option<(usize, f64)>)> {
    let out = schur::schur_forward(&grid(phi)?, depth, alpha_minus_one).map_err(raise)?;
    Ok((PyData(out.data), out.degeneracy))
}

#[pyfunction]
#[pyo3(signature = (v, m = DEFAULT_GRID))]
fn spectral_density(v: PyRef<'_, PyData>, m: usize) -> PyResult<Vec<f64>> {
    cmv::spectral_density(&v.0, m)
        .map(|w| w.real_parts())
        .map_err(raise)
}

/// Carathéodory function at points of the open disk.
#[pyfunction]
fn caratheodory(v: PyRef<'_, PyData>, points: Vec<Complex64>) -> PyResult<Vec<Complex64>> {
    cmv::caratheodory(&v.0, &points).map_err(raise)
}

/// Leading `m × m` block of the CMV matrix, as a list of rows.
#[pyfunction]
fn cmv_matrix(v: PyRef<'_, PyData>, m: usize) -> PyResult<Vec<Vec<Complex64>>> {
    cmv::build_cmv(&v.0, m)
        .map(|c| rows(c.matrix()))
        .map_err(raise)
}

#[pyfunction]
#[pyo3(signature = (v, m = DEFAULT_GRID))]
fn scattering_function(v: PyRef<'_, PyData>, m: usize) -> PyResult<PyScattering> {
    scattering::scattering_function(&v.0, m)
        .map(PyScattering)
        .map_err(raise)
}

/// Finite-section canonicity test; returns the report as a dict.
#[pyfunction]
#[pyo3(signature = (s, sizes = DEFAULT_SIZES.to_vec(), tau_lo = DEFAULT_TAU_LO, tau_hi = DEFAULT_TAU_HI))]
fn canonical_test(
    py: Python<'_>,
    s: Vec<Complex64>,
    sizes: Vec<usize>,
    tau_lo: f64,
    tau_hi: f64,
) -> PyResult<Py<PyAny>> {
    let report = scattering::canonical_test(&grid(s)?, &sizes, tau_lo, tau_hi).map_err(raise)?;
    to_py(py, &report)
}

/// Recovers the data from grid samples of `s`. Raises `NonCanonicalError`
/// unless the symbol is certified canonical or `assume_canonical` is set.
#[pyfunction]
#[pyo3(signature = (s, depth = 32, assume_canonical = false))]
fn inverse_scattering(
    s: Vec<Complex64>,
    depth: usize,
    assume_canonical: bool,
) -> PyResult<PyInverse> {
    let s = grid(s)?;
    let result = if assume_canonical {
        scattering::inverse_scattering_assuming_canonical(&s, depth)
    } else {
        scattering::inverse_scattering(&s, depth)
    };
    result.map(PyInverse).map_err(raise)
}

/// Solutions for `s = κtᴺ`, one per unimodular `tau`.
#[pyfunction]
fn noncanonical_family(
    py: Python<'_>,
    s: Vec<Complex64>,
    taus: Vec<Complex64>,
) -> PyResult<Vec<Py<PyDict>>> {
    let family = scattering::noncanonical_family(&grid(s)?, &taus).map_err(raise)?;
    family
        .into_iter()
        .map(|f| {
            let d = PyDict::new(py);
            d.set_item("tau", f.tau)?;
            d.set_item("alpha_minus_one", f.alpha_minus_one)?;
            d.set_item("d_taylor", f.d_taylor)?;
            d.set_item("w", f.w.real_parts())?;
            d.set_item("match_error", f.match_error)?;
            Ok(d.unbind())
        })
        .collect()
}

#[pyfunction]
fn hankel_block(s: Vec<Complex64>, m: usize) -> PyResult<Vec<Vec<Complex64>>> {
    operators::hankel_block(&grid(s)?.analyze(), m)
        .map(|b| rows(&b.matrix))
        .map_err(raise)
}

#[pyfunction]
#[pyo3(signature = (v, m, grid = DEFAULT_GRID))]
fn transformation_block(
    v: PyRef<'_, PyData>,
    m: usize,
    grid: usize,
) -> PyResult<Vec<Vec<Complex64>>> {
    operators::transformation_block(&v.0, m, grid)
        .map(|b| rows(&b.matrix))
        .map_err(raise)
}

/// `‖(I - 𝓗*𝓗)_m - (ℒ*ℒ)_m‖_F` and the Hankel tail bound.
#[pyfunction]
#[pyo3(signature = (v, m, grid = DEFAULT_GRID))]
fn glm_residual(v: PyRef<'_, PyData>, m: usize, grid: usize) -> PyResult<(f64, f64)> {
    operators::glm_residual(&v.0, m, grid)
        .map(|r| (r.residual, r.tail_bound))
        .map_err(raise)
}

#[pyfunction]
#[pyo3(signature = (v, m, grid = DEFAULT_GRID))]
fn widom_check(py: Python<'_>, v: PyRef<'_, PyData>, m: usize, grid: usize) -> PyResult<Py<PyAny>> {
    let report = operators::widom_check(&v.0, m, grid).map_err(raise)?;
    to_py(py, &report)
}

/// `max |G - I|` for the model-space basis `"f"` or `"e"`.
#[pyfunction]
#[pyo3(signature = (v, m, basis = "f", grid = DEFAULT_GRID))]
fn model_gram_defect(v: PyRef<'_, PyData>, m: usize, basis: &str, grid: usize) -> PyResult<f64> {
    let basis = match basis {
        "f" => Basis::F,
        "e" => Basis::E,
        other => {
            return Err(CmvError::new_err(format!(
                "basis must be 'f' or 'e', got {other:?}"
            )))
        }
    };
    operators::model_gram(&v.0, m, basis, grid)
        .map(|g| operators::gram_defect(&g))
        .map_err(raise)
}

#[pyfunction]
#[pyo3(signature = (s, m, top = 10))]
fn hankel_spectrum(py: Python<'_>, s: Vec<Complex64>, m: usize, top: usize) -> PyResult<Py<PyAny>> {
    let spectrum = operators::hankel_spectrum(&grid(s)?.analyze(), m, top).map_err(raise)?;
    to_py(py, &spectrum)
}

/// Running dyadic-arc supremum per depth, as `(depth, sup)` pairs.
#[pyfunction]
#[pyo3(signature = (w, max_depth = classes::DEFAULT_A2_DEPTH))]
fn a2_supremum(w: Vec<f64>, max_depth: usize) -> PyResult<Vec<(usize, f64)>> {
    let w = grid(w.into_iter().map(|x| Complex64::new(x, 0.0)).collect())?;
    classes::a2_supremum(&w, max_depth)
        .map(|t| t.into_iter().map(|l| (l.depth, l.sup)).collect())
        .map_err(raise)
}

#[pyfunction]
fn gi_functional(py: Python<'_>, v: PyRef<'_, PyData>) -> PyResult<Py<PyAny>> {
    to_py(py, &classes::gi_functional(&v.0))
}

/// Class report for exactly one of `data`, `weight` or `scattering`.
#[pyfunction]
#[pyo3(signature = (data = None, weight = None, scattering = None, grid = DEFAULT_GRID, depth = 64))]
fn classify(
    py: Python<'_>,
    data: Option<PyRef<'_, PyData>>,
    weight: Option<Vec<f64>>,
    scattering: Option<Vec<Complex64>>,
    grid: usize,
    depth: usize,
) -> PyResult<Py<PyAny>> {
    let input = match (data, weight, scattering) {
        (Some(v), None, None) => ClassInput::Verblunsky(v.0.clone()),
        (None, Some(w), None) => ClassInput::Weight(self::grid(
            w.into_iter().map(|x| Complex64::new(x, 0.0)).collect(),
        )?),
        (None, None, Some(s)) => ClassInput::Scattering(self::grid(s)?),
        _ => {
            return Err(CmvError::new_err(
                "pass exactly one of data, weight, scattering",
            ))
        }
    };
    let opts = ClassifyOptions {
        grid,
        depth,
        ..ClassifyOptions::default()
    };
    let report = classes::classify(&input, &opts).map_err(raise)?;
    to_py(py, &report)
}

#[pymodule]
fn cmvscat(m: &Bound<'_, PyModule>) -> PyResult<()> {
    let py = m.py();
    m.add("CmvError", py.get_type::<CmvError>())?;
    m.add("NonCanonicalError", py.get_type::<NonCanonicalError>())?;
    m.add_class::<PyData>()?;
    m.add_class::<PyScattering>()?;
    m.add_class::<PyInverse>()?;
    m.add_function(wrap_pyfunction!(jacobi, m)?)?;
    m.add_function(wrap_pyfunction!(bernstein, m)?)?;
    m.add_function(wrap_pyfunction!(geometric, m)?)?;
    m.add_function(wrap_pyfunction!(polyweight, m)?)?;
    m.add_function(wrap_pyfunction!(hs_generator, m)?)?;
    m.add_function(wrap_pyfunction!(schur_inverse, m)?)?;
    m.add_function(wrap_pyfunction!(schur_forward, m)?)?;
    m.add_function(wrap_pyfunction!(spectral_density, m)?)?;
    m.add_function(wrap_pyfunction!(caratheodory, m)?)?;
    m.add_function(wrap_pyfunction!(cmv_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(scattering_function, m)?)?;
    m.add_function(wrap_pyfunction!(canonical_test, m)?)?;
    m.add_function(wrap_pyfunction!(inverse_scattering, m)?)?;
    m.add_function(wrap_pyfunction!(noncanonical_family, m)?)?;
    m.add_function(wrap_pyfunction!(hankel_block, m)?)?;
    m.add_function(wrap_pyfunction!(transformation_block, m)?)?;
    m.add_function(wrap_pyfunction!(glm_residual, m)?)?;
    m.add_function(wrap_pyfunction!(widom_check, m)?)?;
    m.add_function(wrap_pyfunction!(model_gram_defect, m)?)?;
    m.add_function(wrap_pyfunction!(hankel_spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(a2_supremum, m)?)?;
    m.add_function(wrap_pyfunction!(gi_functional, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    Ok(())
}

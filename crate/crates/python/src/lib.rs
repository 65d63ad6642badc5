//! Python bindings for the `cone-runge` core crate.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use serde::Deserialize;

use cone_runge::approx::{runge_experiment as experiment, SamplerConfig};
use cone_runge::clifford::{split, PRODUCT_TABLE};
use cone_runge::runge::analyze_domain_grid;
use cone_runge::selftest::run_selftest;
use cone_runge::stem::RationalSliceFunction;
use cone_runge::{
    analyze_pair as pair_report, in_cone as cone_test, in_root_sphere as sphere_test, rasterize,
    slice_coords, slice_eval, Cl3Element, DomainSpec, Error, SliceFunction, SlicePolynomial,
};

fn value_error(e: Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse<'a, T: Deserialize<'a>>(text: &'a str) -> PyResult<T> {
    serde_json::from_str(text).map_err(|e| PyValueError::new_err(e.to_string()))
}

fn to_json(value: &impl serde::Serialize) -> String {
    serde_json::to_string(value).expect("serialisable report")
}

/// An element of the Clifford algebra `R3` in the basis
/// `1, e1, e2, e3, e12, e13, e23, e123`.
#[pyclass(name = "Cl3", module = "cone_runge_py", frozen, skip_from_py_object)]
#[derive(Clone, Copy)]
struct PyCl3 {
    inner: Cl3Element,
}

#[pymethods]
impl PyCl3 {
    #[new]
    fn new(coeffs: [f64; 8]) -> Self {
        PyCl3 {
            inner: Cl3Element::new(coeffs),
        }
    }

    #[staticmethod]
    fn basis(index: usize) -> PyResult<Self> {
        if index >= 8 {
            return Err(PyValueError::new_err("basis index must be below 8"));
        }
        Ok(PyCl3 {
            inner: Cl3Element::basis(index),
        })
    }

    #[getter]
    fn coeffs(&self) -> [f64; 8] {
        *self.inner.coeffs()
    }

    fn conj(&self) -> Self {
        PyCl3 {
            inner: self.inner.conj(),
        }
    }

    fn norm(&self) -> f64 {
        self.inner.norm()
    }

    /// The quaternion pair `(q, p)` with `x = ω₊ q + ω₋ p`, each as `[w, x, y, z]`.
    fn split(&self) -> ([f64; 4], [f64; 4]) {
        let s = split(&self.inner);
        let q = |v: cone_runge::Quaternion| [v.w, v.x, v.y, v.z];
        (q(s.q), q(s.p))
    }

    fn in_cone(&self, tol: f64) -> PyResult<bool> {
        cone_test(&self.inner, tol).map_err(value_error)
    }

    fn in_root_sphere(&self, tol: f64) -> PyResult<bool> {
        sphere_test(&self.inner, tol).map_err(value_error)
    }

    /// `(alpha, beta, J)` with `J = None` on the real axis.
    fn slice_coords(&self, tol: f64) -> PyResult<(f64, f64, Option<PyCl3>)> {
        let c = slice_coords(&self.inner, tol).map_err(value_error)?;
        Ok((c.alpha, c.beta, c.j.map(|inner| PyCl3 { inner })))
    }

    fn __mul__(&self, other: PyRef<'_, PyCl3>) -> Self {
        PyCl3 {
            inner: self.inner * other.inner,
        }
    }

    fn __add__(&self, other: PyRef<'_, PyCl3>) -> Self {
        PyCl3 {
            inner: self.inner + other.inner,
        }
    }

    fn __sub__(&self, other: PyRef<'_, PyCl3>) -> Self {
        PyCl3 {
            inner: self.inner - other.inner,
        }
    }

    fn __neg__(&self) -> Self {
        PyCl3 { inner: -self.inner }
    }

    fn __eq__(&self, other: PyRef<'_, PyCl3>) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!("Cl3({})", self.inner)
    }
}

/// A slice polynomial `sum x^k a_k` with right coefficients.
#[pyclass(
    name = "SlicePolynomial",
    module = "cone_runge_py",
    frozen,
    skip_from_py_object
)]
struct PySlicePolynomial {
    inner: SliceFunction,
}

#[pymethods]
impl PySlicePolynomial {
    #[new]
    fn new(coeffs: Vec<PyRef<'_, PyCl3>>) -> Self {
        let p = SlicePolynomial::new(coeffs.iter().map(|c| c.inner).collect());
        PySlicePolynomial {
            inner: SliceFunction::polynomial(p),
        }
    }

    #[staticmethod]
    fn real(coeffs: Vec<f64>) -> Self {
        PySlicePolynomial {
            inner: SliceFunction::polynomial(SlicePolynomial::real(&coeffs)),
        }
    }

    fn __call__(&self, x: PyRef<'_, PyCl3>) -> PyResult<PyCl3> {
        let inner = slice_eval(&self.inner, &x.inner).map_err(value_error)?;
        Ok(PyCl3 { inner })
    }

    /// The stem components `(F1, F2)` at `alpha + i beta`.
    fn stem(&self, alpha: f64, beta: f64) -> PyResult<(PyCl3, PyCl3)> {
        let v = self.inner.stem_at(alpha, beta).map_err(value_error)?;
        Ok((PyCl3 { inner: v.f1 }, PyCl3 { inner: v.f2 }))
    }
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum FunctionSpec {
    Polynomial(SlicePolynomial),
    Rational(RationalSliceFunction),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PairSpec {
    #[serde(rename = "D")]
    d: DomainSpec,
    #[serde(rename = "D1")]
    d1: DomainSpec,
}

/// Runs the identity suite and returns the report as JSON.
#[pyfunction]
#[pyo3(signature = (samples = 1000, seed = 0))]
fn selftest(samples: usize, seed: u64) -> String {
    to_json(&run_selftest(&PRODUCT_TABLE, samples, seed))
}

/// Topology and Betti report of a domain spec given as JSON.
#[pyfunction]
fn analyze(domain: &str) -> PyResult<String> {
    let spec: DomainSpec = parse(domain)?;
    let grid = rasterize(&spec).map_err(value_error)?;
    Ok(to_json(&analyze_domain_grid(&grid).map_err(value_error)?))
}

/// Runge-pair report for two domain specs given as JSON.
#[pyfunction]
fn analyze_pair(d: &str, d1: &str) -> PyResult<String> {
    let d: DomainSpec = parse(d)?;
    let d1: DomainSpec = parse(d1)?;
    Ok(to_json(&pair_report(&d, &d1).map_err(value_error)?))
}

/// Approximation experiment; `pair` is `{"D": .., "D1": ..}` and `function`
/// a polynomial or rational definition, both as JSON.
#[pyfunction]
#[pyo3(signature = (pair, function, degrees, seed = 0))]
fn runge_experiment(
    py: Python<'_>,
    pair: &str,
    function: &str,
    degrees: Vec<usize>,
    seed: u64,
) -> PyResult<String> {
    let pair: PairSpec = parse(pair)?;
    let f = match parse::<FunctionSpec>(function)? {
        FunctionSpec::Polynomial(p) => SliceFunction::polynomial(p),
        FunctionSpec::Rational(r) => SliceFunction::rational(r),
    };
    let config = SamplerConfig {
        seed,
        ..SamplerConfig::default()
    };
    let record = py
        .detach(|| experiment(&pair.d, &pair.d1, &f, &degrees, &config))
        .map_err(value_error)?;
    Ok(to_json(&record))
}

#[pymodule]
fn cone_runge_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyCl3>()?;
    m.add_class::<PySlicePolynomial>()?;
    m.add_function(wrap_pyfunction!(selftest, m)?)?;
    m.add_function(wrap_pyfunction!(analyze, m)?)?;
    m.add_function(wrap_pyfunction!(analyze_pair, m)?)?;
    m.add_function(wrap_pyfunction!(runge_experiment, m)?)?;
    Ok(())
}

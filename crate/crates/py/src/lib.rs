//! Python bindings: `import hplab`.

use hplab_core::config::{ExperimentConfig, Pair};
use hplab_core::equilibrium::{self, EquilibriumSolution};
use hplab_core::hermite_pade::{self, HPTypeI, HPTypeII};
use hplab_core::maps::{Interval, IntervalUnion};
use hplab_core::markov::MarkovPair;
use hplab_core::measure::DiscreteMeasure;
use hplab_core::poly::Polynomial;
use hplab_core::precision::to_c64;
use hplab_core::verify::{self, CheckSettings};
use hplab_core::{cli, Error, PrecisionContext};
use num_complex::Complex64;
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;

create_exception!(hplab, HplabError, PyException);

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Config(_) | Error::Domain(_) | Error::BranchPoint(_) | Error::BranchChoice(_) => {
            PyValueError::new_err(e.to_string())
        }
        _ => HplabError::new_err(e.to_string()),
    }
}

fn context(bits: u32) -> PyResult<PrecisionContext> {
    PrecisionContext::new(bits).map_err(py_err)
}

fn support(intervals: Vec<(f64, f64)>) -> PyResult<IntervalUnion> {
    let parts = intervals
        .into_iter()
        .map(|(a, b)| Interval::new(a, b))
        .collect::<hplab_core::Result<Vec<_>>>()
        .map_err(py_err)?;
    IntervalUnion::new(parts).map_err(py_err)
}

fn coefficients(p: &Polynomial) -> Vec<Complex64> {
    p.coeffs().iter().map(to_c64).collect()
}

/// A probability measure with finitely many atoms.
#[pyclass(name = "Measure", module = "hplab", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyMeasure {
    inner: DiscreteMeasure,
}

#[pymethods]
impl PyMeasure {
    #[new]
    fn new(nodes: Vec<f64>, weights: Vec<f64>) -> PyResult<Self> {
        let inner = DiscreteMeasure::from_real(&nodes, weights).map_err(py_err)?;
        Ok(PyMeasure { inner })
    }

    #[getter]
    fn nodes(&self) -> Vec<Complex64> {
        self.inner.nodes().to_vec()
    }

    #[getter]
    fn weights(&self) -> Vec<f64> {
        self.inner.weights().to_vec()
    }

    #[getter]
    fn mass(&self) -> f64 {
        self.inner.mass()
    }

    fn cdf(&self, x: f64) -> PyResult<f64> {
        self.inner.cdf(x).map_err(py_err)
    }

    fn ks_distance(&self, other: &PyMeasure) -> PyResult<f64> {
        verify::ks_distance(&self.inner, &other.inner).map_err(py_err)
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }
}

#[pyclass(name = "Equilibrium", module = "hplab", frozen)]
pub struct PyEquilibrium {
    inner: EquilibriumSolution,
}

#[pymethods]
impl PyEquilibrium {
    #[getter]
    fn measure(&self) -> PyMeasure {
        PyMeasure {
            inner: self.inner.measure.clone(),
        }
    }

    #[getter]
    fn w(&self) -> f64 {
        self.inner.constant_w
    }

    #[getter]
    fn residual(&self) -> f64 {
        self.inner.residual
    }

    #[getter]
    fn energy(&self) -> f64 {
        self.inner.energy
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }
}

/// Type II polynomial `q_2n` with its numerators.
#[pyclass(name = "TypeII", module = "hplab", frozen)]
pub struct PyTypeII {
    inner: HPTypeII,
    ctx: PrecisionContext,
}

#[pymethods]
impl PyTypeII {
    #[getter]
    fn n(&self) -> usize {
        self.inner.n
    }

    #[getter]
    fn degree(&self) -> usize {
        self.inner.degree
    }

    #[getter]
    fn nullity(&self) -> usize {
        self.inner.nullity
    }

    #[getter]
    fn system_residual(&self) -> f64 {
        self.inner.system_residual
    }

    #[getter]
    fn germ_residual(&self) -> (f64, f64) {
        (self.inner.germ_residual[0], self.inner.germ_residual[1])
    }

    /// Monomial coefficients of `q`, ascending.
    fn q(&self) -> Vec<Complex64> {
        coefficients(&self.inner.q)
    }

    fn p1(&self) -> Vec<Complex64> {
        coefficients(&self.inner.p1)
    }

    fn p2(&self) -> Vec<Complex64> {
        coefficients(&self.inner.p2)
    }

    /// Chebyshev coefficients of `q` in the basis `T_0 = 2, T_k`.
    fn chebyshev(&self) -> Vec<Complex64> {
        self.inner.q_cheb.coeffs().iter().map(to_c64).collect()
    }

    fn zeros(&self, py: Python<'_>) -> PyResult<Vec<Complex64>> {
        let (cloud, _) = py
            .detach(|| hermite_pade::type2_zeros(&self.inner, &self.ctx))
            .map_err(py_err)?;
        Ok(cloud.points)
    }

    fn zeros_csv(&self, py: Python<'_>) -> PyResult<String> {
        let (cloud, _) = py
            .detach(|| hermite_pade::type2_zeros(&self.inner, &self.ctx))
            .map_err(py_err)?;
        Ok(cloud.to_csv())
    }
}

/// Type I polynomials `(Q_0, Q_1, Q_2)`.
#[pyclass(name = "TypeI", module = "hplab", frozen)]
pub struct PyTypeI {
    inner: HPTypeI,
    ctx: PrecisionContext,
}

#[pymethods]
impl PyTypeI {
    #[getter]
    fn n(&self) -> usize {
        self.inner.n
    }

    #[getter]
    fn remainder_order(&self) -> i64 {
        self.inner.remainder_order
    }

    #[getter]
    fn nullity(&self) -> usize {
        self.inner.nullity
    }

    fn coefficients(&self) -> [Vec<Complex64>; 3] {
        [
            coefficients(&self.inner.q0),
            coefficients(&self.inner.q1),
            coefficients(&self.inner.q2),
        ]
    }

    fn zeros(&self, py: Python<'_>) -> PyResult<[Vec<Complex64>; 3]> {
        let clouds = py
            .detach(|| hermite_pade::type1_zeros(&self.inner, &self.ctx))
            .map_err(py_err)?;
        Ok(clouds.map(|c| c.points))
    }
}

/// `q_2n` of the Markov pair with uniform density on `support`.
#[pyfunction]
#[pyo3(signature = (support, n, bits = 512))]
fn type2_markov(py: Python<'_>, support: Vec<(f64, f64)>, n: usize, bits: u32) -> PyResult<PyTypeII> {
    let ctx = context(bits)?;
    let pair = MarkovPair::uniform(self::support(support)?);
    let inner = py.detach(|| hermite_pade::hp_type2_markov(&pair, n, &ctx)).map_err(py_err)?;
    Ok(PyTypeII { inner, ctx })
}

fn config_pair(config_json: &str, bits: Option<u32>) -> PyResult<(Pair, PrecisionContext)> {
    let cfg = ExperimentConfig::from_json(config_json).map_err(py_err)?;
    let ctx = context(bits.unwrap_or(cfg.precision_bits))?;
    Ok((cfg.pair.resolve().map_err(py_err)?, ctx))
}

/// `q_2n` for the pair described by an experiment config (JSON text).
#[pyfunction]
#[pyo3(signature = (config_json, n, bits = None))]
fn type2_from_config(py: Python<'_>, config_json: &str, n: usize, bits: Option<u32>) -> PyResult<PyTypeII> {
    let (pair, ctx) = config_pair(config_json, bits)?;
    let inner = py.detach(|| cli::type2_for(&pair, n, &ctx)).map_err(py_err)?;
    Ok(PyTypeII { inner, ctx })
}

/// Type I polynomials for an algebraic config (JSON text).
#[pyfunction]
#[pyo3(signature = (config_json, n, bits = None))]
fn type1_from_config(py: Python<'_>, config_json: &str, n: usize, bits: Option<u32>) -> PyResult<PyTypeI> {
    let (pair, ctx) = config_pair(config_json, bits)?;
    let Pair::Algebraic(spec) = pair else {
        return Err(PyValueError::new_err("type I polynomials need an algebraic pair"));
    };
    let inner = py.detach(|| cli::type1_for(&spec, n, &ctx)).map_err(py_err)?;
    Ok(PyTypeI { inner, ctx })
}

#[pyfunction]
#[pyo3(signature = (support, nodes = 400, tol = 1e-3))]
fn scalar_equilibrium(py: Python<'_>, support: Vec<(f64, f64)>, nodes: usize, tol: f64) -> PyResult<PyEquilibrium> {
    let f = self::support(support)?;
    let inner = py
        .detach(|| equilibrium::solve_scalar_equilibrium(&f, nodes, tol))
        .map_err(py_err)?;
    Ok(PyEquilibrium { inner })
}

#[pyfunction]
#[pyo3(signature = (a, b, nodes = 400, tol = 1e-3))]
fn vector_equilibrium(py: Python<'_>, a: f64, b: f64, nodes: usize, tol: f64) -> PyResult<PyEquilibrium> {
    let j = Interval::new(a, b).map_err(py_err)?;
    let inner = py
        .detach(|| equilibrium::solve_vector_equilibrium(&j, nodes, tol))
        .map_err(py_err)?;
    Ok(PyEquilibrium { inner })
}

/// `¼ β_E(λ) + ¾ τ_E`, the limit of the normalized type II zero measures.
#[pyfunction]
#[pyo3(signature = (lambda_f, nodes = 400))]
fn type2_limit_measure(lambda_f: &PyMeasure, nodes: usize) -> PyResult<PyMeasure> {
    let inner = equilibrium::type2_limit_measure(&lambda_f.inner, nodes).map_err(py_err)?;
    Ok(PyMeasure { inner })
}

/// Lemma-1 style comparison report (JSON) for a uniform Markov pair.
#[pyfunction]
#[pyo3(signature = (support, degrees, bits = 512, ks_tolerance = 0.1))]
fn check_lemma1(
    py: Python<'_>,
    support: Vec<(f64, f64)>,
    degrees: Vec<usize>,
    bits: u32,
    ks_tolerance: f64,
) -> PyResult<String> {
    let ctx = context(bits)?;
    let pair = MarkovPair::uniform(self::support(support)?);
    let settings = CheckSettings {
        ks_tolerance,
        ..Default::default()
    };
    let r = py
        .detach(|| verify::check_lemma1(&pair, &degrees, &settings, &ctx))
        .map_err(py_err)?;
    Ok(r.to_json())
}

#[pyfunction]
#[pyo3(signature = (support, degrees, bits = 512, ks_tolerance = 0.08))]
fn check_corollary1(
    py: Python<'_>,
    support: Vec<(f64, f64)>,
    degrees: Vec<usize>,
    bits: u32,
    ks_tolerance: f64,
) -> PyResult<String> {
    let ctx = context(bits)?;
    let pair = MarkovPair::uniform(self::support(support)?);
    let settings = CheckSettings {
        ks_tolerance,
        ..Default::default()
    };
    let r = py
        .detach(|| verify::check_corollary1(&pair, &degrees, &settings, &ctx))
        .map_err(py_err)?;
    Ok(r.to_json())
}

#[pyfunction]
#[pyo3(signature = (nodes = 2000, tolerance = 1e-6))]
fn check_lemma2(py: Python<'_>, nodes: usize, tolerance: f64) -> PyResult<String> {
    let r = py
        .detach(|| verify::check_lemma2(nodes, tolerance, &PrecisionContext::default()))
        .map_err(py_err)?;
    Ok(r.to_json())
}

/// The bundled configuration of figure example `k` (1..4), as JSON text.
#[pyfunction]
fn bundled_example(k: usize) -> PyResult<&'static str> {
    match k {
        1..=4 => Ok(cli::BUNDLED_EXAMPLES[k - 1]),
        _ => Err(PyValueError::new_err("example must be 1, 2, 3 or 4")),
    }
}

#[pymodule]
fn hplab(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add("HplabError", m.py().get_type::<HplabError>())?;
    m.add_class::<PyMeasure>()?;
    m.add_class::<PyEquilibrium>()?;
    m.add_class::<PyTypeII>()?;
    m.add_class::<PyTypeI>()?;
    m.add_function(wrap_pyfunction!(type2_markov, m)?)?;
    m.add_function(wrap_pyfunction!(type2_from_config, m)?)?;
    m.add_function(wrap_pyfunction!(type1_from_config, m)?)?;
    m.add_function(wrap_pyfunction!(scalar_equilibrium, m)?)?;
    m.add_function(wrap_pyfunction!(vector_equilibrium, m)?)?;
    m.add_function(wrap_pyfunction!(type2_limit_measure, m)?)?;
    m.add_function(wrap_pyfunction!(check_lemma1, m)?)?;
    m.add_function(wrap_pyfunction!(check_corollary1, m)?)?;
    m.add_function(wrap_pyfunction!(check_lemma2, m)?)?;
    m.add_function(wrap_pyfunction!(bundled_example, m)?)?;
    Ok(())
}

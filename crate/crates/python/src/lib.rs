//! Python bindings for `hoalg`.

use std::collections::HashMap;

use pyo3::exceptions::{PyArithmeticError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use hoalg::algebroid::AlgebroidStructure;
use hoalg::mechanics::{self, AdmissiblePath, OracleFamily, VariationGenerator};
use hoalg::problem::ProblemFile;
use hoalg::{solver, verify, Error};

fn err(e: Error) -> PyErr {
    match e {
        Error::Parse(_)
        | Error::Unbound(_)
        | Error::Schema(_)
        | Error::OrderTooLarge { .. }
        | Error::Inapplicable { .. }
        | Error::Contract(_)
        | Error::OrderMismatch { .. } => PyValueError::new_err(e.to_string()),
        Error::Domain { .. } | Error::NonFinite { .. } => PyArithmeticError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

/// An almost Lie algebroid in local coordinates.
#[pyclass(name = "Algebroid", module = "hoalg", frozen)]
pub struct Algebroid {
    inner: AlgebroidStructure,
}

#[pymethods]
impl Algebroid {
    #[staticmethod]
    fn tangent(n: usize) -> Self {
        Self { inner: AlgebroidStructure::tangent(n) }
    }

    /// A shipped Lie algebra preset: `so3-like` or `heis3-like`.
    #[staticmethod]
    fn lie(name: &str) -> PyResult<Self> {
        Ok(Self { inner: AlgebroidStructure::lie_preset(name).map_err(err)? })
    }

    /// A Lie algebra from constants `c[k][i][j]`.
    #[staticmethod]
    #[pyo3(signature = (c, label = "lie"))]
    fn from_constants(c: Vec<Vec<Vec<f64>>>, label: &str) -> PyResult<Self> {
        Ok(Self { inner: AlgebroidStructure::lie(&c, label).map_err(err)? })
    }

    /// Structure functions as expressions in `x1..xm`: `rho[a][i]`, `c[k][i][j]`.
    #[staticmethod]
    #[pyo3(signature = (m, r, rho, c, label = "custom"))]
    fn custom(m: usize, r: usize, rho: Vec<Vec<String>>, c: Vec<Vec<Vec<String>>>, label: &str) -> PyResult<Self> {
        let rho: Vec<Vec<&str>> = rho.iter().map(|row| row.iter().map(String::as_str).collect()).collect();
        let c: Vec<Vec<Vec<&str>>> = c.iter().map(|m| m.iter().map(|row| row.iter().map(String::as_str).collect()).collect()).collect();
        Ok(Self { inner: AlgebroidStructure::from_strings(m, r, &rho, &c, label).map_err(err)? })
    }

    #[staticmethod]
    fn product(factors: Vec<PyRef<'_, Algebroid>>) -> PyResult<Self> {
        let fs: Vec<AlgebroidStructure> = factors.iter().map(|f| f.inner.clone()).collect();
        Ok(Self { inner: AlgebroidStructure::product(&fs).map_err(err)? })
    }

    #[staticmethod]
    fn affine_heis(g: &str) -> PyResult<Self> {
        Ok(Self { inner: AlgebroidStructure::affine_heis(g).map_err(err)? })
    }

    #[getter]
    fn m(&self) -> usize {
        self.inner.m()
    }

    #[getter]
    fn r(&self) -> usize {
        self.inner.r()
    }

    #[getter]
    fn label(&self) -> String {
        self.inner.label().to_string()
    }

    #[getter]
    fn warnings(&self) -> Vec<String> {
        self.inner.warnings().to_vec()
    }

    fn anchor(&self, x: Vec<f64>, y: Vec<f64>) -> PyResult<Vec<f64>> {
        self.check_rank(&y)?;
        Ok(self.inner.at(&x, &0.0).map_err(err)?.anchor(&y))
    }

    fn bracket(&self, x: Vec<f64>, u: Vec<f64>, v: Vec<f64>) -> PyResult<Vec<f64>> {
        self.check_rank(&u)?;
        self.check_rank(&v)?;
        Ok(self.inner.at(&x, &0.0).map_err(err)?.bracket(&u, &v))
    }

    #[pyo3(signature = (samples = 32, lo = -1.0, hi = 1.0, tol = 1e-9))]
    fn check_axioms<'py>(&self, py: Python<'py>, samples: usize, lo: f64, hi: f64, tol: f64) -> PyResult<Bound<'py, PyDict>> {
        let rep = self.inner.check_axioms_default(samples, lo, hi, tol).map_err(err)?;
        let d = PyDict::new(py);
        d.set_item("samples", rep.samples)?;
        d.set_item("max_skew", rep.max_skew)?;
        d.set_item("max_compat", rep.max_compat)?;
        d.set_item("tol", rep.tol)?;
        d.set_item("passed", rep.pass)?;
        Ok(d)
    }

    fn __repr__(&self) -> String {
        format!("Algebroid({}, m={}, r={})", self.inner.label(), self.inner.m(), self.inner.r())
    }
}

impl Algebroid {
    fn check_rank(&self, v: &[f64]) -> PyResult<()> {
        if v.len() != self.inner.r() {
            return Err(PyValueError::new_err(format!("expected {} fiber components, got {}", self.inner.r(), v.len())));
        }
        Ok(())
    }
}

/// A Lagrangian of order k on Eᵏ, in `x1..xm` and `yi_α` (α < k).
#[pyclass(name = "Lagrangian", module = "hoalg", frozen)]
pub struct Lagrangian {
    inner: mechanics::Lagrangian,
}

#[pymethods]
impl Lagrangian {
    #[new]
    fn new(src: &str, algebroid: &Algebroid, k: usize) -> PyResult<Self> {
        let a = &algebroid.inner;
        Ok(Self { inner: mechanics::Lagrangian::parse(src, a.m(), a.r(), k).map_err(err)? })
    }

    #[getter]
    fn order(&self) -> usize {
        self.inner.order()
    }

    /// `y[i][α] = y^{i,(α)}`.
    fn value(&self, x: Vec<f64>, y: Vec<Vec<f64>>) -> PyResult<f64> {
        self.inner.value(&x, &y, &0.0).map_err(err)
    }

    /// `(∂L/∂x, ∂L/∂y)`.
    #[allow(clippy::type_complexity)]
    fn differential(&self, x: Vec<f64>, y: Vec<Vec<f64>>) -> PyResult<(Vec<f64>, Vec<Vec<f64>>)> {
        self.inner.differential(&x, &y).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("Lagrangian({}, k={})", self.inner.expr(), self.inner.order())
    }
}

/// An admissible path: generator curve `y(t)` and base start `x0`.
#[pyclass(name = "Path", module = "hoalg", frozen)]
pub struct Path {
    algebroid: AlgebroidStructure,
    inner: AdmissiblePath,
}

#[pymethods]
impl Path {
    #[new]
    #[pyo3(signature = (algebroid, y, x0, t0 = 0.0, t1 = 1.0, steps = 200))]
    fn new(algebroid: &Algebroid, y: Vec<String>, x0: Vec<f64>, t0: f64, t1: f64, steps: usize) -> PyResult<Self> {
        let ys: Vec<&str> = y.iter().map(String::as_str).collect();
        let inner = AdmissiblePath::from_strs(&algebroid.inner, &ys, &x0, (t0, t1), steps).map_err(err)?;
        Ok(Self { algebroid: algebroid.inner.clone(), inner })
    }

    #[getter]
    fn interval(&self) -> (f64, f64) {
        (self.inner.t0, self.inner.t1)
    }

    fn base_at(&self, t: f64) -> PyResult<Vec<f64>> {
        self.inner.base_at(&self.algebroid, t).map_err(err)
    }

    /// The Euler–Lagrange force at `t`.
    fn force(&self, lagrangian: &Lagrangian, t: f64) -> PyResult<Vec<f64>> {
        Ok(mechanics::force(&self.algebroid, &lagrangian.inner, &self.inner, t).map_err(err)?.f)
    }

    /// Momentum `m[i][γ]` at `t`.
    fn momentum(&self, lagrangian: &Lagrangian, t: f64) -> PyResult<Vec<Vec<f64>>> {
        Ok(mechanics::momentum(&self.algebroid, &lagrangian.inner, &self.inner, t).map_err(err)?.m)
    }

    /// Closed-form force for `tangent`, `algebroid_k1`, `algebroid_k2`,
    /// `euler_poincare` or `hamel_k2`.
    fn oracle(&self, lagrangian: &Lagrangian, t: f64, family: &str) -> PyResult<Vec<f64>> {
        let fam = OracleFamily::from_name(family).ok_or_else(|| {
            let known: Vec<&str> = OracleFamily::ALL.iter().map(|f| f.name()).collect();
            PyValueError::new_err(format!("unknown oracle family `{family}`; known: {}", known.join(", ")))
        })?;
        mechanics::oracle_el(&self.algebroid, &lagrangian.inner, &self.inner, t, fam).map_err(err)
    }

    /// Terms of `⟨dL, δ_b⟩ = ⟨F, b⟩ + d/dt⟨M, j^{k−1}b⟩` for a generator `b(t)`.
    fn variational_identity<'py>(&self, py: Python<'py>, lagrangian: &Lagrangian, b: Vec<String>, t: f64) -> PyResult<Bound<'py, PyDict>> {
        let bs: Vec<&str> = b.iter().map(String::as_str).collect();
        let gen = VariationGenerator::from_strs(&bs).map_err(err)?;
        let terms = mechanics::variational_identity(&self.algebroid, &lagrangian.inner, &self.inner, &gen, t).map_err(err)?;
        let d = PyDict::new(py);
        d.set_item("lhs", terms.lhs)?;
        d.set_item("force_term", terms.force_term)?;
        d.set_item("boundary_term", terms.boundary_term)?;
        d.set_item("residual", terms.residual())?;
        Ok(d)
    }
}

/// A problem file as accepted by the command line tool.
#[pyclass(name = "Problem", module = "hoalg", frozen)]
pub struct Problem {
    file: ProblemFile,
}

#[pymethods]
impl Problem {
    #[staticmethod]
    fn from_json(src: &str) -> PyResult<Self> {
        Ok(Self { file: ProblemFile::from_json(src).map_err(err)? })
    }

    fn algebroid(&self) -> PyResult<Algebroid> {
        Ok(Algebroid { inner: self.file.algebroid().map_err(err)? })
    }

    fn lagrangian(&self) -> PyResult<Lagrangian> {
        let a = self.file.algebroid().map_err(err)?;
        Ok(Lagrangian { inner: self.file.lagrangian(&a).map_err(err)? })
    }

    fn path(&self) -> PyResult<Path> {
        let a = self.file.algebroid().map_err(err)?;
        let inner = self.file.path(&a).map_err(err)?;
        Ok(Path { algebroid: a, inner })
    }

    fn sample_times(&self) -> Vec<f64> {
        self.file.sample_times()
    }

    /// Runs the collocation solver described by the file.
    fn solve<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let a = self.file.algebroid().map_err(err)?;
        let p = self.file.collocation(&a).map_err(err)?;
        let rep = py.detach(|| solver::solve(&p)).map_err(err)?;
        let d = PyDict::new(py);
        d.set_item("coeffs", rep.coeffs)?;
        d.set_item("iterations", rep.iterations)?;
        d.set_item("converged", rep.converged)?;
        d.set_item("sup_force", rep.sup_force)?;
        d.set_item("boundary_residual", rep.boundary_residual)?;
        d.set_item("condition", rep.condition)?;
        d.set_item("history", rep.history)?;
        Ok(d)
    }
}

/// Canonical printed form of an expression.
#[pyfunction]
fn parse(src: &str) -> PyResult<String> {
    Ok(hoalg::parse(src).map_err(|e| err(e.into()))?.to_string())
}

#[pyfunction]
fn free_vars(src: &str) -> PyResult<Vec<String>> {
    Ok(hoalg::parse(src).map_err(|e| err(e.into()))?.free_vars().into_iter().collect())
}

#[pyfunction]
#[pyo3(signature = (src, env = None))]
fn evaluate(src: &str, env: Option<HashMap<String, f64>>) -> PyResult<f64> {
    let e = hoalg::parse(src).map_err(|e| err(e.into()))?;
    match env {
        Some(env) if !env.is_empty() => e.eval(&env.into_iter().collect()).map_err(err),
        _ => e.eval_const().map_err(err),
    }
}

#[pyfunction]
fn suites() -> Vec<&'static str> {
    verify::SUITES.to_vec()
}

/// Runs one identity suite, or all of them when `suite` is omitted.
#[pyfunction]
#[pyo3(signature = (suite = None, seed = 0))]
fn run_verify<'py>(py: Python<'py>, suite: Option<String>, seed: u64) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let results = py
        .detach(|| match &suite {
            Some(s) => verify::run_suite(s, seed).map(|r| vec![r]),
            None => verify::run_all(seed),
        })
        .map_err(err)?;
    results
        .into_iter()
        .map(|r| {
            let d = PyDict::new(py);
            d.set_item("name", r.name)?;
            d.set_item("instances", r.instances)?;
            d.set_item("max_residual", r.max_residual)?;
            d.set_item("tol", r.tol)?;
            d.set_item("passed", r.pass)?;
            Ok(d)
        })
        .collect()
}

#[pymodule]
#[pyo3(name = "hoalg")]
fn hoalg_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Algebroid>()?;
    m.add_class::<Lagrangian>()?;
    m.add_class::<Path>()?;
    m.add_class::<Problem>()?;
    m.add_function(wrap_pyfunction!(parse, m)?)?;
    m.add_function(wrap_pyfunction!(free_vars, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate, m)?)?;
    m.add_function(wrap_pyfunction!(suites, m)?)?;
    m.add_function(wrap_pyfunction!(run_verify, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}

//! Python bindings. Every object carries its backend; rational values cross
//! the boundary as `"p/q"` strings, float values as Python floats.

use darboux_core::crum::{casoratian as core_casoratian, potential_closed_form_seq, superpotential_closed_form};
use darboux_core::darboux::generate_seed;
use darboux_core::reproduce::run_example as core_run_example;
use darboux_core::verify::{verify_chain, ChainData};
use darboux_core::{
    Backend, Chain as CoreChain, DarbouxStep as CoreStep, Error, Expr, Rational, Scalar, Seed as CoreSeed, Seq,
    Window, DEFAULT_FLOAT_TOL,
};
use pyo3::exceptions::{PyIndexError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyFloat, PyInt, PyString};

fn err(e: Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn mixed() -> PyErr {
    PyValueError::new_err("objects from different backends cannot be combined")
}

fn backend(name: &str) -> PyResult<Backend> {
    name.parse().map_err(err)
}

fn scalar<S: Scalar>(x: &Bound<'_, PyAny>) -> PyResult<S> {
    if x.is_instance_of::<PyString>() {
        S::parse_literal(&x.extract::<String>()?).map_err(err)
    } else if x.is_instance_of::<PyInt>() {
        Ok(S::from_int(x.extract::<i64>()?))
    } else if x.is_instance_of::<PyFloat>() {
        Ok(S::from_f64(x.extract::<f64>()?))
    } else {
        Err(PyValueError::new_err("expected a str, int or float"))
    }
}

fn default_tol(b: Backend, tol: Option<f64>) -> f64 {
    tol.unwrap_or(match b {
        Backend::Rational => 0.0,
        Backend::Float => DEFAULT_FLOAT_TOL,
    })
}

/// Runs `$body` with `$x` bound to the payload of either variant.
macro_rules! dispatch {
    ($v:expr, $x:ident => $body:expr) => {
        match $v {
            Any::Rational($x) => Any::Rational($body),
            Any::Float($x) => Any::Float($body),
        }
    };
}

macro_rules! each {
    ($v:expr, $x:ident => $body:expr) => {
        match $v {
            Any::Rational($x) => $body,
            Any::Float($x) => $body,
        }
    };
}

#[derive(Clone, Debug, PartialEq)]
pub enum Any<R, F> {
    Rational(R),
    Float(F),
}

type AnySeq = Any<Seq<Rational>, Seq<f64>>;

impl<R, F> Any<R, F> {
    fn backend(&self) -> Backend {
        match self {
            Any::Rational(_) => Backend::Rational,
            Any::Float(_) => Backend::Float,
        }
    }
}

/// A finite sequence on an integer window `[lo, hi]`.
#[pyclass(module = "darboux_py", frozen, from_py_object)]
#[derive(Clone, Debug)]
pub struct Sequence(pub AnySeq);

#[pymethods]
impl Sequence {
    #[new]
    #[pyo3(signature = (lo, values, backend = "rational"))]
    fn py_new(lo: i64, values: Vec<Bound<'_, PyAny>>, backend: &str) -> PyResult<Self> {
        Ok(Sequence(match self::backend(backend)? {
            Backend::Rational => Any::Rational(
                Seq::new(lo, values.iter().map(scalar).collect::<PyResult<_>>()?).map_err(err)?,
            ),
            Backend::Float => {
                Any::Float(Seq::new(lo, values.iter().map(scalar).collect::<PyResult<_>>()?).map_err(err)?)
            }
        }))
    }

    /// Tabulates an expression in `n` on `[lo, hi]`.
    #[staticmethod]
    #[pyo3(signature = (expr, lo, hi, backend = "rational"))]
    pub fn from_expr(expr: &str, lo: i64, hi: i64, backend: &str) -> PyResult<Self> {
        let e = Expr::parse(expr).map_err(err)?;
        let w = Window::new(lo, hi).map_err(err)?;
        Ok(Sequence(match self::backend(backend)? {
            Backend::Rational => Any::Rational(e.tabulate(w).map_err(err)?),
            Backend::Float => Any::Float(e.tabulate(w).map_err(err)?),
        }))
    }

    #[getter]
    pub fn backend(&self) -> String {
        self.0.backend().to_string()
    }

    #[getter]
    pub fn lo(&self) -> i64 {
        each!(&self.0, s => s.lo())
    }

    #[getter]
    pub fn hi(&self) -> i64 {
        each!(&self.0, s => s.hi())
    }

    fn __len__(&self) -> usize {
        each!(&self.0, s => s.len())
    }

    /// Value at `n` in canonical text form.
    pub fn at(&self, n: i64) -> PyResult<String> {
        each!(&self.0, s => s.get(n).map(|v| v.format()).ok_or_else(|| {
            PyIndexError::new_err(format!("index {n} outside [{}, {}]", s.lo(), s.hi()))
        }))
    }

    pub fn values(&self) -> Vec<String> {
        each!(&self.0, s => s.values().iter().map(|v| v.format()).collect())
    }

    pub fn to_floats(&self) -> Vec<f64> {
        each!(&self.0, s => s.values().iter().map(|v| v.to_f64()).collect())
    }

    pub fn to_csv(&self) -> String {
        each!(&self.0, s => s.to_csv())
    }

    fn __eq__(&self, other: &Sequence) -> bool {
        self.0 == other.0
    }

    fn __repr__(&self) -> String {
        format!("Sequence(backend={}, window=[{}, {}])", self.backend(), self.lo(), self.hi())
    }
}

/// A solution of the shifted eigenproblem for a given potential.
#[pyclass(module = "darboux_py", frozen, from_py_object)]
#[derive(Clone, Debug)]
pub struct Seed(pub Any<CoreSeed<Rational>, CoreSeed<f64>>);

#[pymethods]
impl Seed {
    /// Solves the seed recurrence over `v0` from `psi(lo) = psi0`, `psi(lo+1) = psi1`.
    #[staticmethod]
    pub fn generate(
        v0: &Sequence,
        eps: &Bound<'_, PyAny>,
        psi0: &Bound<'_, PyAny>,
        psi1: &Bound<'_, PyAny>,
    ) -> PyResult<Self> {
        Ok(Seed(match &v0.0 {
            Any::Rational(v) => Any::Rational(generate_seed(v, scalar(eps)?, scalar(psi0)?, scalar(psi1)?).map_err(err)?),
            Any::Float(v) => Any::Float(generate_seed(v, scalar(eps)?, scalar(psi0)?, scalar(psi1)?).map_err(err)?),
        }))
    }

    /// Wraps a tabulated sequence, checking it against `v0`.
    #[new]
    #[pyo3(signature = (psi, eps, v0, tol = None))]
    fn py_new(psi: &Sequence, eps: &Bound<'_, PyAny>, v0: &Sequence, tol: Option<f64>) -> PyResult<Self> {
        let t = default_tol(v0.0.backend(), tol);
        Ok(Seed(match (&psi.0, &v0.0) {
            (Any::Rational(p), Any::Rational(v)) => {
                Any::Rational(CoreSeed::with_tolerance(p.clone(), scalar(eps)?, v, t).map_err(err)?)
            }
            (Any::Float(p), Any::Float(v)) => {
                Any::Float(CoreSeed::with_tolerance(p.clone(), scalar(eps)?, v, t).map_err(err)?)
            }
            _ => return Err(mixed()),
        }))
    }

    #[getter]
    pub fn psi(&self) -> Sequence {
        Sequence(dispatch!(&self.0, s => s.psi().clone()))
    }

    #[getter]
    pub fn eps(&self) -> String {
        each!(&self.0, s => s.eps().format())
    }

    fn __repr__(&self) -> String {
        format!("Seed(eps={}, backend={})", self.eps(), self.0.backend())
    }
}

/// One Darboux step `V₀ -> V₁` driven by a seed.
#[pyclass(module = "darboux_py", frozen, from_py_object)]
#[derive(Clone, Debug)]
pub struct DarbouxStep(pub Any<CoreStep<Rational>, CoreStep<f64>>);

#[pymethods]
impl DarbouxStep {
    #[new]
    pub fn new(v0: &Sequence, seed: &Seed) -> PyResult<Self> {
        Ok(DarbouxStep(match (&v0.0, &seed.0) {
            (Any::Rational(v), Any::Rational(s)) => Any::Rational(CoreStep::new(v.clone(), s.clone()).map_err(err)?),
            (Any::Float(v), Any::Float(s)) => Any::Float(CoreStep::new(v.clone(), s.clone()).map_err(err)?),
            _ => return Err(mixed()),
        }))
    }

    #[getter]
    pub fn f1(&self) -> Sequence {
        Sequence(dispatch!(&self.0, s => s.f1.clone()))
    }

    #[getter]
    pub fn v1(&self) -> Sequence {
        Sequence(dispatch!(&self.0, s => s.v1.clone()))
    }

    /// Maps a solution of `H₀` to one of `H₁`.
    pub fn transform(&self, phi: &Sequence) -> PyResult<Sequence> {
        Ok(Sequence(match (&self.0, &phi.0) {
            (Any::Rational(s), Any::Rational(p)) => Any::Rational(s.transform_solution(p).map_err(err)?),
            (Any::Float(s), Any::Float(p)) => Any::Float(s.transform_solution(p).map_err(err)?),
            _ => return Err(mixed()),
        }))
    }

    /// Largest potential update and compatibility defects, as text.
    pub fn residuals(&self) -> PyResult<(String, String)> {
        each!(&self.0, s => {
            let (a, b) = s.theorem1_residuals().map_err(err)?;
            Ok((a.max_abs().format(), b.max_abs().format()))
        })
    }
}

/// A Crum chain of successive Darboux steps with distinct `ε`.
#[pyclass(module = "darboux_py", frozen, from_py_object)]
#[derive(Clone, Debug)]
pub struct Chain(pub Any<CoreChain<Rational>, CoreChain<f64>>);

#[pymethods]
impl Chain {
    #[new]
    #[pyo3(signature = (v0, tol = None))]
    pub fn new(v0: &Sequence, tol: Option<f64>) -> Self {
        let t = default_tol(v0.0.backend(), tol);
        Chain(dispatch!(&v0.0, v => CoreChain::new(v.clone()).with_tolerance(t)))
    }

    /// A new chain with one more step.
    pub fn extend(&self, seed: &Seed) -> PyResult<Chain> {
        Ok(Chain(match (&self.0, &seed.0) {
            (Any::Rational(c), Any::Rational(s)) => Any::Rational(c.extend(s.clone()).map_err(err)?),
            (Any::Float(c), Any::Float(s)) => Any::Float(c.extend(s.clone()).map_err(err)?),
            _ => return Err(mixed()),
        }))
    }

    #[getter]
    pub fn k(&self) -> usize {
        each!(&self.0, c => c.k())
    }

    /// `V_i` for `0 <= i <= k`.
    pub fn potential(&self, i: usize) -> PyResult<Sequence> {
        self.pick(i, self.k() + 1, |c, i| dispatch!(c, c => c.potentials[i].clone()))
    }

    /// `f_i` for `1 <= i <= k`.
    pub fn superpotential(&self, i: usize) -> PyResult<Sequence> {
        self.pick_from_one(i, |c, i| dispatch!(c, c => c.fs[i].clone()))
    }

    /// `ψ̂_i` for `1 <= i <= k`.
    pub fn state(&self, i: usize) -> PyResult<Sequence> {
        self.pick_from_one(i, |c, i| dispatch!(c, c => c.states[i].clone()))
    }

    /// Applies every raising ladder of the chain to `phi`.
    pub fn transform(&self, phi: &Sequence) -> PyResult<Sequence> {
        Ok(Sequence(match (&self.0, &phi.0) {
            (Any::Rational(c), Any::Rational(p)) => Any::Rational(c.transform(p).map_err(err)?),
            (Any::Float(c), Any::Float(p)) => Any::Float(c.transform(p).map_err(err)?),
            _ => return Err(mixed()),
        }))
    }

    /// Full residual verification, returned as a JSON document.
    #[pyo3(signature = (tol = None))]
    pub fn verify(&self, tol: Option<f64>) -> PyResult<String> {
        let t = default_tol(self.0.backend(), tol);
        let rep = each!(&self.0, c => serde_json::to_string(&verify_chain(&ChainData::from(c), t)));
        rep.map_err(|e| PyValueError::new_err(e.to_string()))
    }
}

impl Chain {
    fn pick(
        &self,
        i: usize,
        len: usize,
        get: impl Fn(&Any<CoreChain<Rational>, CoreChain<f64>>, usize) -> AnySeq,
    ) -> PyResult<Sequence> {
        if i >= len {
            return Err(PyIndexError::new_err(format!("index {i} out of range for a chain with k = {}", self.k())));
        }
        Ok(Sequence(get(&self.0, i)))
    }

    fn pick_from_one(
        &self,
        i: usize,
        get: impl Fn(&Any<CoreChain<Rational>, CoreChain<f64>>, usize) -> AnySeq,
    ) -> PyResult<Sequence> {
        if i == 0 {
            return Err(PyIndexError::new_err("steps are numbered from 1"));
        }
        self.pick(i - 1, self.k(), get)
    }
}

fn same_backend(cols: &[Sequence]) -> PyResult<Backend> {
    let b = cols.first().map_or(Backend::Rational, |c| c.0.backend());
    if cols.iter().any(|c| c.0.backend() != b) {
        return Err(mixed());
    }
    Ok(b)
}

fn rational_cols(cols: &[Sequence]) -> Vec<&Seq<Rational>> {
    cols.iter().filter_map(|c| match &c.0 { Any::Rational(s) => Some(s), _ => None }).collect()
}

fn float_cols(cols: &[Sequence]) -> Vec<&Seq<f64>> {
    cols.iter().filter_map(|c| match &c.0 { Any::Float(s) => Some(s), _ => None }).collect()
}

/// `det[ψ_c(n + r)]` over the given columns.
#[pyfunction]
pub fn casoratian(columns: Vec<Sequence>, n: i64) -> PyResult<String> {
    match same_backend(&columns)? {
        Backend::Rational => core_casoratian(&rational_cols(&columns), n).map(|v| v.format()).map_err(err),
        Backend::Float => core_casoratian(&float_cols(&columns), n).map(|v| v.format()).map_err(err),
    }
}

/// `f_k(n)` from the Casoratians of the first `k` seeds.
#[pyfunction]
pub fn superpotential_from_casoratians(seeds: Vec<Sequence>, n: i64) -> PyResult<String> {
    match same_backend(&seeds)? {
        Backend::Rational => superpotential_closed_form(&rational_cols(&seeds), n).map(|v| v.format()).map_err(err),
        Backend::Float => superpotential_closed_form(&float_cols(&seeds), n).map(|v| v.format()).map_err(err),
    }
}

/// `V_k` from the Casoratians of the seeds, on its maximal window.
#[pyfunction]
#[pyo3(signature = (seeds, v0, tol = None))]
pub fn potential_from_casoratians(seeds: Vec<Sequence>, v0: &Sequence, tol: Option<f64>) -> PyResult<Sequence> {
    let b = same_backend(&seeds)?;
    if b != v0.0.backend() {
        return Err(mixed());
    }
    let t = default_tol(b, tol);
    Ok(Sequence(match &v0.0 {
        Any::Rational(v) => Any::Rational(potential_closed_form_seq(&rational_cols(&seeds), v, t).map_err(err)?),
        Any::Float(v) => Any::Float(potential_closed_form_seq(&float_cols(&seeds), v, t).map_err(err)?),
    }))
}

/// `(-Δ² + V) ψ`.
#[pyfunction]
pub fn apply_h(v: &Sequence, psi: &Sequence) -> PyResult<Sequence> {
    Ok(Sequence(match (&v.0, &psi.0) {
        (Any::Rational(v), Any::Rational(p)) => Any::Rational(darboux_core::operators::apply_h(v, p).map_err(err)?),
        (Any::Float(v), Any::Float(p)) => Any::Float(darboux_core::operators::apply_h(v, p).map_err(err)?),
        _ => return Err(mixed()),
    }))
}

/// Reproduces one worked example and returns its report as JSON.
#[pyfunction]
pub fn run_example(name: &str) -> PyResult<String> {
    let rep = core_run_example(name).map_err(err)?;
    serde_json::to_string(&rep).map_err(|e| PyValueError::new_err(e.to_string()))
}

#[pymodule]
fn darboux_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Sequence>()?;
    m.add_class::<Seed>()?;
    m.add_class::<DarbouxStep>()?;
    m.add_class::<Chain>()?;
    m.add_function(wrap_pyfunction!(casoratian, m)?)?;
    m.add_function(wrap_pyfunction!(superpotential_from_casoratians, m)?)?;
    m.add_function(wrap_pyfunction!(potential_from_casoratians, m)?)?;
    m.add_function(wrap_pyfunction!(apply_h, m)?)?;
    m.add_function(wrap_pyfunction!(run_example, m)?)?;
    Ok(())
}

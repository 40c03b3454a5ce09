//! Python bindings.
//!
//! Failures surface as `ValueError` carrying the library's own message.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use ::bangtensor as bt;
use bt::boxops::{self, BoxOp, OpKind};
use bt::calculus::{Checker, Equation};
use bt::instantiate::{enumerate_instances, InstanceBound};
use bt::model::{evaluate, AnyModel, InstanceReport, TensorValue};
use bt::{BoxName, EdgeName, TensorExpr};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn box_name(s: &str) -> PyResult<BoxName> {
    BoxName::new(s).map_err(err)
}

fn edge_name(s: &str) -> PyResult<EdgeName> {
    EdgeName::new(s).map_err(err)
}

/// A !-tensor expression.
#[pyclass(name = "Tensor", module = "bangtensor", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyTensor(TensorExpr);

#[pymethods]
impl PyTensor {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        bt::parse_tensor(text).map(Self).map_err(err)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        bt::syntax::import_json(text).map(Self).map_err(err)
    }

    fn to_json(&self) -> String {
        bt::syntax::export_json(&self.0)
    }

    fn __str__(&self) -> String {
        bt::print_tensor(&self.0)
    }

    fn __repr__(&self) -> String {
        format!("Tensor({:?})", bt::print_tensor(&self.0))
    }

    /// Syntactic equality. Use `equiv` for equality up to equivalence.
    fn __eq__(&self, other: &Self) -> bool {
        self.0 == other.0
    }

    fn __hash__(&self) -> u64 {
        let mut h = DefaultHasher::new();
        self.0.hash(&mut h);
        h.finish()
    }

    fn is_wellformed(&self) -> bool {
        bt::is_wellformed(&self.0)
    }

    /// Human-readable descriptions of every violated condition.
    fn violations(&self) -> Vec<String> {
        match bt::check_wellformed(&self.0) {
            Ok(()) => Vec::new(),
            Err(vs) => vs.iter().map(ToString::to_string).collect(),
        }
    }

    fn normalize(&self) -> PyResult<Self> {
        bt::normalize(&self.0).map(Self).map_err(err)
    }

    fn equiv(&self, other: &Self) -> PyResult<bool> {
        bt::equiv(&self.0, &other.0).map_err(err)
    }

    fn exp(&self, target: &str) -> PyResult<Self> {
        self.op(OpKind::Exp, target)
    }

    fn kill(&self, target: &str) -> PyResult<Self> {
        self.op(OpKind::Kill, target)
    }

    fn copy(&self, target: &str) -> PyResult<Self> {
        self.op(OpKind::Copy, target)
    }

    fn drop(&self, target: &str) -> PyResult<Self> {
        self.op(OpKind::Drop, target)
    }

    fn weaken(&self, target: &str, k: &Self) -> PyResult<Self> {
        boxops::weaken(&box_name(target)?, &k.0, &self.0)
            .map(Self)
            .map_err(err)
    }

    fn rename_edge(&self, old: &str, new: &str) -> PyResult<Self> {
        boxops::rename_edge(&edge_name(old)?, &edge_name(new)?, &self.0)
            .map(Self)
            .map_err(err)
    }

    fn rename_box(&self, old: &str, new: &str) -> PyResult<Self> {
        boxops::rename_box(&box_name(old)?, &box_name(new)?, &self.0)
            .map(Self)
            .map_err(err)
    }

    /// Concrete instances with at most `bound` expansions of each box.
    fn instances(&self, bound: usize) -> PyResult<Vec<Self>> {
        bt::check_wellformed(&self.0).map_err(|vs| err(&vs[0]))?;
        Ok(enumerate_instances(&self.0, InstanceBound(bound))
            .into_iter()
            .map(Self)
            .collect())
    }

    fn to_dot(&self) -> PyResult<String> {
        bt::render::to_dot(&self.0).map_err(err)
    }
}

impl PyTensor {
    fn op(&self, kind: OpKind, target: &str) -> PyResult<Self> {
        let op = BoxOp::new(kind, box_name(target)?);
        let mut fr = boxops::fresh_for([&self.0]);
        boxops::apply_op(&op, &mut fr, &self.0)
            .map(Self)
            .map_err(err)
    }
}

/// A generator signature with its axioms.
#[pyclass(name = "Theory", module = "bangtensor", frozen)]
struct PyTheory(bt::calculus::Theory);

#[pymethods]
impl PyTheory {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        bt::syntax::parse_theory(text).map(Self).map_err(err)
    }

    /// Generator name to arity pattern.
    #[getter]
    fn generators(&self) -> Vec<(String, String)> {
        self.0
            .generators
            .iter()
            .map(|(g, a)| (g.clone(), a.to_string()))
            .collect()
    }

    #[getter]
    fn axioms(&self) -> Vec<String> {
        self.0
            .axioms
            .iter()
            .filter_map(|a| a.name.clone())
            .collect()
    }

    /// The two sides of a named axiom.
    fn axiom(&self, name: &str) -> PyResult<(PyTensor, PyTensor)> {
        let a = self
            .0
            .axiom(name)
            .ok_or_else(|| err(format!("no axiom named {name}")))?;
        Ok((PyTensor(a.lhs.clone()), PyTensor(a.rhs.clone())))
    }

    /// Check proof scripts in order. Theorems accepted by earlier scripts are
    /// available to later ones.
    #[pyo3(signature = (*scripts))]
    fn prove(&self, scripts: Vec<String>) -> PyResult<PyVerdict> {
        let mut checker = Checker::new(&self.0);
        let mut theorems = Vec::new();
        let mut text = String::new();
        for s in &scripts {
            let script = bt::syntax::parse_proof(s).map_err(err)?;
            let v = checker.check_script(&script);
            text.push_str(&v.to_string());
            theorems.extend(v.theorems.iter().map(|t| (t.name.clone(), t.accepted())));
        }
        Ok(PyVerdict { theorems, text })
    }
}

/// The checker's judgement on a sequence of proof scripts.
#[pyclass(name = "Verdict", module = "bangtensor", frozen)]
struct PyVerdict {
    /// Theorem name and whether it was accepted.
    #[pyo3(get)]
    theorems: Vec<(String, bool)>,
    text: String,
}

#[pymethods]
impl PyVerdict {
    #[getter]
    fn accepted(&self) -> bool {
        self.theorems.iter().all(|(_, ok)| *ok)
    }

    fn __str__(&self) -> String {
        self.text.clone()
    }

    fn __bool__(&self) -> bool {
        self.accepted()
    }
}

/// An array model read from `.btm` text.
#[pyclass(name = "Model", module = "bangtensor", frozen)]
struct PyModel(AnyModel);

fn value_to_py<'py, S: Clone>(
    py: Python<'py>,
    v: TensorValue<S>,
    conv: impl Fn(Python<'py>, S) -> PyResult<Py<PyAny>>,
) -> PyResult<(Vec<String>, Vec<Py<PyAny>>)> {
    let axes = v.axes.iter().map(ToString::to_string).collect();
    let data = v
        .data
        .into_iter()
        .map(|x| conv(py, x))
        .collect::<PyResult<_>>()?;
    Ok((axes, data))
}

#[pymethods]
impl PyModel {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        bt::model::parse_model(text).map(Self).map_err(err)
    }

    #[getter]
    fn semiring(&self) -> &'static str {
        self.0.semiring()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    /// Value of a concrete expression as its axis labels and row-major
    /// entries. Rational entries come back as `fractions.Fraction`.
    fn evaluate(&self, py: Python<'_>, g: &PyTensor) -> PyResult<(Vec<String>, Vec<Py<PyAny>>)> {
        match &self.0 {
            AnyModel::Int(m) => value_to_py(py, evaluate(&g.0, m).map_err(err)?, |py, x| {
                Ok(x.into_pyobject(py)?.into_any().unbind())
            }),
            AnyModel::Float(m) => value_to_py(py, evaluate(&g.0, m).map_err(err)?, |py, x| {
                Ok(x.into_pyobject(py)?.into_any().unbind())
            }),
            AnyModel::Rational(m) => {
                let fraction = py.import("fractions")?.getattr("Fraction")?;
                value_to_py(py, evaluate(&g.0, m).map_err(err)?, |_, x| {
                    Ok(fraction.call1((*x.numer(), *x.denom()))?.unbind())
                })
            }
        }
    }

    /// Compare both sides on every instance up to `bound`.
    fn check(&self, lhs: &PyTensor, rhs: &PyTensor, bound: usize) -> PyResult<PyReport> {
        let eq = Equation::new(lhs.0.clone(), rhs.0.clone());
        self.0
            .check(&eq, InstanceBound(bound))
            .map(PyReport)
            .map_err(err)
    }
}

/// Outcome of checking an equation in a model.
#[pyclass(name = "Report", module = "bangtensor", frozen)]
struct PyReport(InstanceReport);

#[pymethods]
impl PyReport {
    #[getter]
    fn passed(&self) -> bool {
        self.0.passed()
    }

    #[getter]
    fn checked(&self) -> usize {
        self.0.checked
    }

    /// Each failing instance as its two sides and the first differing entry.
    #[getter]
    fn failures(&self) -> Vec<(PyTensor, PyTensor, String)> {
        self.0
            .failures
            .iter()
            .map(|f| {
                (
                    PyTensor(f.lhs.clone()),
                    PyTensor(f.rhs.clone()),
                    f.reason.clone(),
                )
            })
            .collect()
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }
}

#[pymodule(name = "bangtensor")]
fn bangtensor_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyTensor>()?;
    m.add_class::<PyTheory>()?;
    m.add_class::<PyVerdict>()?;
    m.add_class::<PyModel>()?;
    m.add_class::<PyReport>()?;
    Ok(())
}

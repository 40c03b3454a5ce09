//! Equations between !-tensors and the inference rules acting on them.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::boxops::{self, apply_op, fresh_for, BoxOp, FreshnessFunction, OpError};
use crate::context::{free_contexts, nesting, Context};
use crate::expr::{Factor, TensorExpr};
use crate::instantiate::{instantiate_pair, InstanceBound};
use crate::names::{BoxName, DirectedEdge, EdgeName};
use crate::normalize::equiv;
use crate::wellformed::{violations, Violation};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Equation {
    pub lhs: TensorExpr,
    pub rhs: TensorExpr,
    pub name: Option<String>,
}

impl Equation {
    pub fn new(lhs: TensorExpr, rhs: TensorExpr) -> Self {
        Self {
            lhs,
            rhs,
            name: None,
        }
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn flip(&self) -> Self {
        Self {
            lhs: self.rhs.clone(),
            rhs: self.lhs.clone(),
            name: None,
        }
    }

    pub fn sides(&self) -> [TensorExpr; 2] {
        [self.lhs.clone(), self.rhs.clone()]
    }

    /// Every free edge name of the equation, which by compatibility are the
    /// free names of either side.
    pub fn free_names(&self) -> BTreeSet<EdgeName> {
        let mut out = self.lhs.free_names();
        out.extend(self.rhs.free_names());
        out
    }

    pub fn edge_names(&self) -> BTreeSet<EdgeName> {
        let mut out = self.lhs.edge_names();
        out.extend(self.rhs.edge_names());
        out
    }

    pub fn box_names(&self) -> BTreeSet<BoxName> {
        let mut out = self.lhs.all_box_names();
        out.extend(self.rhs.all_box_names());
        out
    }

    pub fn top_level_boxes(&self) -> BTreeSet<BoxName> {
        self.lhs.top_level_boxes().into_iter().collect()
    }

    /// Both sides equivalent to the sides of `other`, in order.
    pub fn sidewise_equiv(&self, other: &Equation) -> bool {
        matches!(equiv(&self.lhs, &other.lhs), Ok(true))
            && matches!(equiv(&self.rhs, &other.rhs), Ok(true))
    }
}

impl fmt::Display for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}", self.lhs, self.rhs)
    }
}

/// First difference found between the boundaries of two sides.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum Mismatch {
    #[error("free edge {edge} occurs only on the {side}")]
    FreeEdge {
        edge: DirectedEdge,
        side: &'static str,
    },
    #[error("!-box {name} occurs only on the {side}")]
    BoxName { name: BoxName, side: &'static str },
    #[error("!-box {inner} is nested in {outer} only on the {side}")]
    Nesting {
        inner: BoxName,
        outer: BoxName,
        side: &'static str,
    },
    #[error("free edge {edge} has context [{}] on the left but [{}] on the right", ctx_text(.lhs), ctx_text(.rhs))]
    Context {
        edge: DirectedEdge,
        lhs: Context,
        rhs: Context,
    },
}

fn ctx_text(c: &Context) -> String {
    c.iter()
        .map(|b| b.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

fn one_sided<T: Ord + Clone>(l: &BTreeSet<T>, r: &BTreeSet<T>) -> Option<(T, &'static str)> {
    l.difference(r)
        .next()
        .map(|x| (x.clone(), "left"))
        .or_else(|| r.difference(l).next().map(|x| (x.clone(), "right")))
}

/// Check that two sides have compatible boundaries.
pub fn check_compatible(lhs: &TensorExpr, rhs: &TensorExpr) -> Result<(), Mismatch> {
    if let Some((edge, side)) = one_sided(&lhs.free_edges(), &rhs.free_edges()) {
        return Err(Mismatch::FreeEdge { edge, side });
    }
    if let Some((name, side)) = one_sided(&lhs.all_box_names(), &rhs.all_box_names()) {
        return Err(Mismatch::BoxName { name, side });
    }
    if let Some(((inner, outer), side)) = one_sided(&nesting(lhs), &nesting(rhs)) {
        return Err(Mismatch::Nesting { inner, outer, side });
    }
    let (cl, cr) = (free_contexts(lhs), free_contexts(rhs));
    for (edge, l) in &cl {
        let r = &cr[edge];
        if l != r {
            return Err(Mismatch::Context {
                edge: edge.clone(),
                lhs: l.clone(),
                rhs: r.clone(),
            });
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum EquationError {
    #[error("{side} side is not well-formed: {}", .violations.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    IllFormed {
        side: &'static str,
        violations: Vec<Violation>,
    },
    #[error("incompatible boundaries: {0}")]
    Incompatible(#[from] Mismatch),
    #[error(transparent)]
    Op(#[from] OpError),
}

/// Check both sides are well-formed and their boundaries agree.
pub fn validate(eq: &Equation) -> Result<(), EquationError> {
    for (side, g) in [("left", &eq.lhs), ("right", &eq.rhs)] {
        let v = violations(g);
        if !v.is_empty() {
            return Err(EquationError::IllFormed {
                side,
                violations: v,
            });
        }
    }
    check_compatible(&eq.lhs, &eq.rhs)?;
    Ok(())
}

/// Apply an operation to both sides with one freshness function.
pub fn apply_op_eq(op: &BoxOp, eq: &Equation) -> Result<Equation, EquationError> {
    let mut fr = fresh_for(&eq.sides());
    apply_op_eq_with(op, &mut fr, eq)
}

pub fn apply_op_eq_with(
    op: &BoxOp,
    fr: &mut FreshnessFunction,
    eq: &Equation,
) -> Result<Equation, EquationError> {
    let lhs = apply_op(op, fr, &eq.lhs)?;
    let rhs = apply_op(op, fr, &eq.rhs)?;
    Ok(Equation::new(lhs, rhs))
}

/// Rename the bound names of `g` that appear in `avoid` to unused names.
pub fn rename_bound_apart(g: &TensorExpr, avoid: &BTreeSet<EdgeName>) -> TensorExpr {
    let clashes: Vec<EdgeName> = g.bound_names().intersection(avoid).cloned().collect();
    if clashes.is_empty() {
        return g.clone();
    }
    let mut fr = FreshnessFunction::avoiding(avoid.iter().cloned().chain(g.edge_names()), []);
    let map: BTreeMap<EdgeName, EdgeName> = clashes
        .into_iter()
        .map(|a| (a.clone(), fr.edge(&a)))
        .collect();
    g.map_edge_names(&mut |e| map.get(e).cloned().unwrap_or_else(|| e.clone()))
}

/// (Prod): `G = H` gives `G K = H K`. Bound names on either side of the
/// product are renamed apart first, so only free names connect.
pub fn prod(eq: &Equation, k: &TensorExpr) -> Result<Equation, EquationError> {
    let k = rename_bound_apart(k, &eq.edge_names());
    let kn = k.edge_names();
    let side = |g: &TensorExpr| rename_bound_apart(g, &kn).product(&k);
    let out = Equation::new(side(&eq.lhs), side(&eq.rhs));
    validate(&out)?;
    Ok(out)
}

/// (Box): `G = H` gives `[G]A = [H]A`.
pub fn box_intro(eq: &Equation, a: &BoxName) -> Result<Equation, EquationError> {
    let wrap = |g: &TensorExpr| {
        TensorExpr::new(vec![Factor::Box {
            name: a.clone(),
            body: g.clone(),
        }])
    };
    let out = Equation::new(wrap(&eq.lhs), wrap(&eq.rhs));
    validate(&out)?;
    Ok(out)
}

/// (Weaken): add `K` inside box `A` on both sides.
pub fn weaken_eq(eq: &Equation, a: &BoxName, k: &TensorExpr) -> Result<Equation, EquationError> {
    let k = rename_bound_apart(k, &eq.edge_names());
    let kn = k.edge_names();
    let lhs = boxops::weaken(a, &k, &rename_bound_apart(&eq.lhs, &kn))?;
    let rhs = boxops::weaken(a, &k, &rename_bound_apart(&eq.rhs, &kn))?;
    let out = Equation::new(lhs, rhs);
    check_compatible(&out.lhs, &out.rhs)?;
    Ok(out)
}

/// (EdgeRename) applied directly. A bound name equal to the target is moved
/// out of the way first.
pub fn rename_edge_eq(
    eq: &Equation,
    a: &EdgeName,
    b: &EdgeName,
) -> Result<Equation, EquationError> {
    let avoid = BTreeSet::from([b.clone()]);
    let sides = eq.sides().map(|g| rename_bound_apart(&g, &avoid));
    let [l, r] = sides;
    Ok(Equation::new(
        boxops::rename_edge(a, b, &l)?,
        boxops::rename_edge(a, b, &r)?,
    ))
}

/// (BoxRename) applied directly.
pub fn rename_box_eq(eq: &Equation, a: &BoxName, b: &BoxName) -> Result<Equation, EquationError> {
    Ok(Equation::new(
        boxops::rename_box(a, b, &eq.lhs)?,
        boxops::rename_box(a, b, &eq.rhs)?,
    ))
}

/// Concrete instances of an equation under shared instantiations, up to
/// renaming of fresh free names and of bound names.
pub fn instantiate_equation(eq: &Equation, bound: InstanceBound) -> Vec<Equation> {
    let fixed = eq.free_names();
    instantiate_pair(&eq.lhs, &eq.rhs, bound, &fixed)
        .into_keys()
        .map(|(l, r)| Equation::new(l, r))
        .collect()
}

/// Instances of `eq` keyed canonically, for inclusion tests between equations
/// whose free names differ only by fresh copies.
pub fn instance_keys(eq: &Equation, bound: InstanceBound) -> BTreeSet<(TensorExpr, TensorExpr)> {
    instantiate_pair(&eq.lhs, &eq.rhs, bound, &BTreeSet::new())
        .into_keys()
        .collect()
}

impl Equation {
    pub fn apply(&self, op: &BoxOp) -> Result<Equation, EquationError> {
        apply_op_eq(op, self)
    }
}

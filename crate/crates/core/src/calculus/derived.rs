//! Renaming and Drop recovered from the other rules.
//!
//! The checker applies renamings and Drop directly. These functions build
//! the same conclusions the long way round so tests can confirm the direct
//! versions agree with the derivations.

use std::collections::BTreeMap;

use super::equation::{apply_op_eq_with, prod, weaken_eq, Equation, EquationError};
use crate::boxops::{fresh_for, BoxOp, FreshnessFunction, OpError, OpKind};
use crate::context::context;
use crate::expr::{Factor, TensorExpr};
use crate::names::{BoxName, DirectedEdge, EdgeName};

/// Rename a free edge through (Prod) with an identity wire when the edge has
/// an empty context, or through (Weaken) into its innermost box otherwise.
pub fn derive_edge_rename(
    eq: &Equation,
    a: &EdgeName,
    b: &EdgeName,
) -> Result<Equation, EquationError> {
    let free = eq.lhs.free_edges();
    let edge = [DirectedEdge::out(a.clone()), DirectedEdge::inp(a.clone())]
        .into_iter()
        .find(|e| free.contains(e))
        .ok_or_else(|| OpError::NotFree(a.clone()))?;
    if eq.edge_names().contains(b) {
        return Err(OpError::NameClash(b.to_string()).into());
    }
    let wire = match edge.dir {
        crate::names::Direction::Out => Factor::Id {
            out: b.clone(),
            inp: a.clone(),
        },
        crate::names::Direction::In => Factor::Id {
            out: a.clone(),
            inp: b.clone(),
        },
    };
    let k = TensorExpr::new(vec![wire]);
    let ctx = context(&eq.lhs, &edge).expect("edge is free in the left side");
    match ctx.first() {
        None => prod(eq, &k),
        Some(inner) => weaken_eq(eq, inner, &k),
    }
}

/// Rename box `a` to `b` by two rounds of Copy and Kill. The first round
/// moves everything inside `a` to fresh names, the second moves the box to
/// `b` and every other name back.
pub fn derive_box_rename(
    eq: &Equation,
    a: &BoxName,
    b: &BoxName,
) -> Result<Equation, EquationError> {
    if eq.box_names().contains(b) {
        return Err(OpError::NameClash(b.to_string()).into());
    }
    let mut fr1 = fresh_for(&eq.sides());
    fr1.avoid(&TensorExpr::new(vec![Factor::Box {
        name: b.clone(),
        body: TensorExpr::one(),
    }]));
    let a1 = fr1.boxname(a);
    let copied = apply_op_eq_with(&BoxOp::new(OpKind::Copy, a.clone()), &mut fr1, eq)?;
    let moved = apply_op_eq_with(&BoxOp::new(OpKind::Kill, a.clone()), &mut fr1, &copied)?;

    let mut fr2 = FreshnessFunction::default();
    for (x, y) in fr1.edge_map() {
        fr2.assign_edge(y.clone(), x.clone());
    }
    for (x, y) in fr1.box_map() {
        if x != a {
            fr2.assign_box(y.clone(), x.clone());
        }
    }
    fr2.assign_box(a1.clone(), b.clone());
    fr2.avoid(&moved.lhs);
    fr2.avoid(&moved.rhs);
    let copied = apply_op_eq_with(&BoxOp::new(OpKind::Copy, a1.clone()), &mut fr2, &moved)?;
    apply_op_eq_with(&BoxOp::new(OpKind::Kill, a1), &mut fr2, &copied)
}

/// Drop as `Kill_B . Exp_B` followed by renaming the fresh copies back.
pub fn derive_drop(eq: &Equation, b: &BoxName) -> Result<Equation, EquationError> {
    let mut fr = fresh_for(&eq.sides());
    let expanded = apply_op_eq_with(&BoxOp::new(OpKind::Exp, b.clone()), &mut fr, eq)?;
    let killed = apply_op_eq_with(&BoxOp::new(OpKind::Kill, b.clone()), &mut fr, &expanded)?;
    let edges: BTreeMap<EdgeName, EdgeName> = fr
        .edge_map()
        .iter()
        .map(|(x, y)| (y.clone(), x.clone()))
        .collect();
    let boxes: BTreeMap<BoxName, BoxName> = fr
        .box_map()
        .iter()
        .map(|(x, y)| (y.clone(), x.clone()))
        .collect();
    let back = |g: &TensorExpr| {
        g.map_edge_names(&mut |e| edges.get(e).cloned().unwrap_or_else(|| e.clone()))
            .map_boxes(&mut |x| boxes.get(x).cloned().unwrap_or_else(|| x.clone()))
    };
    Ok(Equation::new(back(&killed.lhs), back(&killed.rhs)))
}

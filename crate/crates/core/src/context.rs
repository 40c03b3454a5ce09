//! Edge contexts, node contexts and box nesting.

use std::collections::{BTreeMap, BTreeSet};

use crate::expr::{Occurrence, TensorExpr};
use crate::names::{BoxName, DirectedEdge};

/// Box names innermost first.
pub type Context = Vec<BoxName>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("edge {0} does not occur")]
pub struct NotFound(pub DirectedEdge);

fn find(g: &TensorExpr, a: &DirectedEdge) -> Result<Occurrence, NotFound> {
    g.occurrences()
        .into_iter()
        .find(|o| &o.edge == a)
        .ok_or_else(|| NotFound(a.clone()))
}

/// Groups enclosing `a` inside its edgeterm, innermost first.
pub fn edge_context(g: &TensorExpr, a: &DirectedEdge) -> Result<Context, NotFound> {
    find(g, a).map(|o| o.ectx)
}

/// Box factors enclosing the node carrying `a`, innermost first.
pub fn node_context(g: &TensorExpr, a: &DirectedEdge) -> Result<Context, NotFound> {
    find(g, a).map(|o| o.nctx)
}

pub fn context(g: &TensorExpr, a: &DirectedEdge) -> Result<Context, NotFound> {
    find(g, a).map(|o| o.ectx.into_iter().chain(o.nctx).collect())
}

/// Immediate nesting pairs `(inner, outer)` read from the Box factor tree.
pub fn nesting(g: &TensorExpr) -> BTreeSet<(BoxName, BoxName)> {
    let mut out = BTreeSet::new();
    g.for_each_box(&mut |b, parent| {
        if let Some(p) = parent {
            out.insert((b.clone(), p.clone()));
        }
    });
    out
}

/// Parent of each Box factor (`None` for top-level boxes). Later duplicates
/// are ignored; duplicates are an F2 matter.
pub fn parent_map(g: &TensorExpr) -> BTreeMap<BoxName, Option<BoxName>> {
    let mut out = BTreeMap::new();
    g.for_each_box(&mut |b, parent| {
        out.entry(b.clone()).or_insert_with(|| parent.cloned());
    });
    out
}

/// Contexts of every free directed edge.
pub fn free_contexts(g: &TensorExpr) -> BTreeMap<DirectedEdge, Context> {
    let free = g.free_edges();
    g.occurrences()
        .into_iter()
        .filter(|o| free.contains(&o.edge))
        .map(|o| (o.edge, o.ectx.into_iter().chain(o.nctx).collect()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::names::bx;
    use crate::syntax::parse_tensor;

    const WORKED: &str = "phi{+a [<(-e)]B>A <(-d)]C} [psi{+d -c}]C [[psi{+e -b}]B]A";

    fn de(s: &str) -> DirectedEdge {
        s.parse().unwrap()
    }

    #[test]
    fn worked_example_contexts() {
        let g = parse_tensor(WORKED).unwrap();
        assert_eq!(edge_context(&g, &de("-e")).unwrap(), vec![bx("B"), bx("A")]);
        assert_eq!(edge_context(&g, &de("+d")).unwrap(), Vec::<BoxName>::new());
        assert_eq!(node_context(&g, &de("-c")).unwrap(), vec![bx("C")]);
        assert_eq!(node_context(&g, &de("+e")).unwrap(), vec![bx("B"), bx("A")]);
        assert_eq!(context(&g, &de("-e")).unwrap(), vec![bx("B"), bx("A")]);
        assert_eq!(context(&g, &de("-d")).unwrap(), vec![bx("C")]);
        // The free output of the boxed psi node is `-b`.
        assert_eq!(context(&g, &de("-b")).unwrap(), vec![bx("B"), bx("A")]);
        assert!(context(&g, &de("+b")).is_err());
    }

    #[test]
    fn trivial_contexts() {
        let g = parse_tensor("phi{+a}").unwrap();
        assert!(edge_context(&g, &de("+a")).unwrap().is_empty());
        assert!(node_context(&g, &de("+a")).unwrap().is_empty());
    }

    #[test]
    fn nesting_relation() {
        let pairs = |s: &str| nesting(&parse_tensor(s).unwrap());
        assert_eq!(pairs("[[psi{}]B]A"), BTreeSet::from([(bx("B"), bx("A"))]));
        assert!(pairs("[psi{}]A [phi{}]B").is_empty());
        assert_eq!(pairs(WORKED), BTreeSet::from([(bx("B"), bx("A"))]));
    }

    #[test]
    fn free_and_bound() {
        let g = parse_tensor("psi{+f -a -b} phi{+a +b -c -d -e}").unwrap();
        let free: Vec<String> = g.free_edges().iter().map(|e| e.to_string()).collect();
        assert_eq!(free, vec!["-c", "-d", "-e", "+f"]);
        assert_eq!(g.bound_names().len(), 2);
        assert!(parse_tensor("1").unwrap().free_edges().is_empty());
        assert_eq!(parse_tensor("id{+a -b}").unwrap().free_edges().len(), 2);
    }
}

//! The well-formedness conditions F1, F2, C1, C2 and C3.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::context::{parent_map, Context};
use crate::expr::{Occurrence, TensorExpr};
use crate::names::{BoxName, DirectedEdge, Direction, EdgeName};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Condition {
    F1,
    F2,
    C1,
    C2,
    C3,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Violation {
    pub code: Condition,
    pub names: Vec<String>,
    pub description: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} violation on {}: {}",
            self.code,
            self.names.join(", "),
            self.description
        )
    }
}

fn show(ctx: &[BoxName]) -> String {
    let parts: Vec<&str> = ctx.iter().map(|b| b.as_str()).collect();
    format!("[{}]", parts.join(", "))
}

/// Witness lists `(es, bs)` for the bound pair `a`, if one exists.
///
/// `es` ranges over prefixes of both edge contexts. Any solution forces `es`
/// to be comparable with each edge context, and the longest prefix obtained
/// this way is the full context itself, so the candidates are exhaustive up to
/// extensions that never change the verdict on lists of distinct names.
pub fn c3_witness(
    e_out: &[BoxName],
    n_out: &[BoxName],
    e_in: &[BoxName],
    n_in: &[BoxName],
) -> Option<(Context, Context)> {
    let mut candidates: Vec<&[BoxName]> = Vec::new();
    for k in 0..=e_out.len() {
        candidates.push(&e_out[..k]);
    }
    for k in 0..=e_in.len() {
        candidates.push(&e_in[..k]);
    }
    for es in candidates {
        let lhs1: Vec<BoxName> = es.iter().chain(n_in).cloned().collect();
        if !lhs1.starts_with(e_out) {
            continue;
        }
        let bs = &lhs1[e_out.len()..];
        let lhs2: Vec<BoxName> = es.iter().chain(n_out).cloned().collect();
        let rhs2: Vec<BoxName> = e_in.iter().chain(bs).cloned().collect();
        if lhs2 == rhs2 {
            return Some((es.to_vec(), bs.to_vec()));
        }
    }
    None
}

pub fn check_wellformed(g: &TensorExpr) -> Result<(), Vec<Violation>> {
    let v = violations(g);
    if v.is_empty() {
        Ok(())
    } else {
        Err(v)
    }
}

pub fn is_wellformed(g: &TensorExpr) -> bool {
    violations(g).is_empty()
}

pub fn violations(g: &TensorExpr) -> Vec<Violation> {
    let mut out = BTreeSet::new();
    let occ = g.occurrences();

    // F1
    let mut counts: BTreeMap<&DirectedEdge, usize> = BTreeMap::new();
    for o in &occ {
        *counts.entry(&o.edge).or_default() += 1;
    }
    for (e, n) in &counts {
        if *n > 1 {
            out.insert(Violation {
                code: Condition::F1,
                names: vec![e.name.to_string()],
                description: format!("{e} occurs {n} times"),
            });
        }
    }

    // F2
    let mut box_counts: BTreeMap<BoxName, usize> = BTreeMap::new();
    g.for_each_box(&mut |b, _| *box_counts.entry(b.clone()).or_default() += 1);
    for (b, n) in &box_counts {
        if *n > 1 {
            out.insert(Violation {
                code: Condition::F2,
                names: vec![b.to_string()],
                description: format!("!-box {b} occurs {n} times"),
            });
        }
    }

    let parents = parent_map(g);
    for o in &occ {
        check_c1(o, &mut out);
        check_c2(o, &parents, &mut out);
    }

    // C3
    let by_edge: BTreeMap<&DirectedEdge, &Occurrence> = occ.iter().map(|o| (&o.edge, o)).collect();
    let bound: BTreeSet<&EdgeName> = occ
        .iter()
        .filter(|o| {
            o.edge.dir == Direction::Out
                && by_edge.contains_key(&DirectedEdge::inp(o.edge.name.clone()))
        })
        .map(|o| &o.edge.name)
        .collect();
    for a in bound {
        let p = by_edge[&DirectedEdge::out(a.clone())];
        let q = by_edge[&DirectedEdge::inp(a.clone())];
        if c3_witness(&p.ectx, &p.nctx, &q.ectx, &q.nctx).is_none() {
            out.insert(Violation {
                code: Condition::C3,
                names: vec![a.to_string()],
                description: format!(
                    "no es, bs relate ectx(+{a}) = {}, nctx(+{a}) = {} with ectx(-{a}) = {}, nctx(-{a}) = {}",
                    show(&p.ectx),
                    show(&p.nctx),
                    show(&q.ectx),
                    show(&q.nctx)
                ),
            });
        }
    }
    out.into_iter().collect()
}

fn check_c1(o: &Occurrence, out: &mut BTreeSet<Violation>) {
    for b in &o.ectx {
        if o.nctx.contains(b) {
            out.insert(Violation {
                code: Condition::C1,
                names: vec![o.edge.name.to_string(), b.to_string()],
                description: format!(
                    "!-box {b} is in both the edge and node context of {}",
                    o.edge
                ),
            });
        }
    }
}

/// The groups around an edge must name existing boxes forming a chain of
/// immediate nestings `E1 < E2 < .. < En`, and the outermost group must sit
/// directly inside the node's innermost box (or at top level when the node is
/// not boxed). The second half keeps the operation closure property intact.
fn check_c2(
    o: &Occurrence,
    parents: &BTreeMap<BoxName, Option<BoxName>>,
    out: &mut BTreeSet<Violation>,
) {
    if o.ectx.is_empty() {
        return;
    }
    for b in &o.ectx {
        if !parents.contains_key(b) {
            out.insert(Violation {
                code: Condition::C2,
                names: vec![o.edge.name.to_string(), b.to_string()],
                description: format!("group !-box {b} around {} does not exist", o.edge),
            });
            return;
        }
    }
    let mut chain: Vec<Option<&BoxName>> = o.ectx.iter().skip(1).map(Some).collect();
    chain.push(o.nctx.first());
    for (inner, outer) in o.ectx.iter().zip(chain) {
        let actual = parents[inner].as_ref();
        if actual != outer {
            let want = outer.map_or("top level".to_string(), |b| format!("inside {b}"));
            out.insert(Violation {
                code: Condition::C2,
                names: vec![o.edge.name.to_string(), inner.to_string()],
                description: format!(
                    "group context of {} requires {inner} to be nested immediately {want}",
                    o.edge
                ),
            });
            return;
        }
    }
}

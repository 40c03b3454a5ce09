//! Graphviz export.
//!
//! Generators and identity wires become nodes labelled with their printed
//! edgeterm, which is where edge order and group arcs are recorded. Boxes
//! become dashed clusters. Each bound name becomes one edge from its output
//! occurrence to its input occurrence, and each free edge is drawn to or from
//! a plaintext boundary node.

use std::collections::BTreeMap;
use std::fmt::Write;

use crate::expr::{Factor, TensorExpr};
use crate::names::{DirectedEdge, EdgeName};
use crate::syntax::print_factor;
use crate::wellformed::{check_wellformed, Violation};

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
#[error("cannot render an ill-formed expression ({} violations)", .0.len())]
pub struct RenderError(pub Vec<Violation>);

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        if c == '"' || c == '\\' {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('"');
    out
}

#[derive(Default)]
struct Writer {
    out: String,
    nodes: usize,
    /// Node holding each occurrence of each directed edge.
    ends: BTreeMap<DirectedEdge, String>,
}

impl Writer {
    fn indent(&mut self, depth: usize) {
        self.out.extend(std::iter::repeat_n("  ", depth));
    }

    fn body(&mut self, g: &TensorExpr, depth: usize) {
        for f in &g.factors {
            match f {
                Factor::Empty => {}
                Factor::Box { name, body } => {
                    self.indent(depth);
                    writeln!(
                        self.out,
                        "subgraph {} {{",
                        quote(&format!("cluster_{name}"))
                    )
                    .unwrap();
                    self.indent(depth + 1);
                    writeln!(self.out, "label={}; style=dashed;", quote(name.as_str())).unwrap();
                    self.body(body, depth + 1);
                    self.indent(depth);
                    self.out.push_str("}\n");
                }
                Factor::Id { out, inp } => {
                    let id = self.node(f, depth, "shape=ellipse");
                    self.ends.insert(DirectedEdge::out(out.clone()), id.clone());
                    self.ends.insert(DirectedEdge::inp(inp.clone()), id);
                }
                Factor::Gen { eterm, .. } => {
                    let id = self.node(f, depth, "shape=box");
                    for e in eterm.edges() {
                        self.ends.insert(e.clone(), id.clone());
                    }
                }
            }
        }
    }

    fn node(&mut self, f: &Factor, depth: usize, shape: &str) -> String {
        let id = format!("n{}", self.nodes);
        self.nodes += 1;
        self.indent(depth);
        writeln!(
            self.out,
            "{id} [{shape}, label={}];",
            quote(&print_factor(f))
        )
        .unwrap();
        id
    }

    fn wires(&mut self) {
        let mut boundary = 0;
        let names: Vec<EdgeName> = {
            let mut v: Vec<_> = self.ends.keys().map(|e| e.name.clone()).collect();
            v.dedup();
            v
        };
        for name in names {
            let out = self.ends.get(&DirectedEdge::out(name.clone())).cloned();
            let inp = self.ends.get(&DirectedEdge::inp(name.clone())).cloned();
            let label = quote(name.as_str());
            let (from, to) = match (out, inp) {
                (Some(o), Some(i)) => (o, i),
                (o, i) => {
                    let b = format!("b{boundary}");
                    boundary += 1;
                    writeln!(self.out, "  {b} [shape=plaintext, label={label}];").unwrap();
                    match (o, i) {
                        (Some(o), _) => (o, b),
                        (_, Some(i)) => (b, i),
                        _ => unreachable!("every recorded name has an occurrence"),
                    }
                }
            };
            writeln!(self.out, "  {from} -> {to} [label={label}];").unwrap();
        }
    }
}

/// Render a well-formed expression as a DOT digraph.
pub fn to_dot(g: &TensorExpr) -> Result<String, RenderError> {
    check_wellformed(g).map_err(RenderError)?;
    let mut w = Writer::default();
    w.body(g, 1);
    w.wires();
    Ok(format!("digraph G {{\n{}}}\n", w.out))
}

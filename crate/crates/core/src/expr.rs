//! Edgeterms and !-tensor expressions.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::names::{BoxName, DirectedEdge, Direction, EdgeName};

/// Expansion direction of an edge group.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    /// `[e>A`: fresh copies are appended after the group.
    Clockwise,
    /// `<e]A`: fresh copies are prepended before the group.
    Anticlockwise,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Group {
    pub orientation: Orientation,
    pub boxname: BoxName,
    pub body: EdgeTerm,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Item {
    Edge(DirectedEdge),
    Group(Group),
}

#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeTerm {
    pub items: Vec<Item>,
}

impl EdgeTerm {
    pub fn new(items: Vec<Item>) -> Self {
        Self { items }
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// Visit every directed edge along with its enclosing groups (innermost first).
    pub fn for_each_edge<'a>(&'a self, f: &mut impl FnMut(&'a DirectedEdge, &[&'a BoxName])) {
        fn go<'a>(
            t: &'a EdgeTerm,
            stack: &mut Vec<&'a BoxName>,
            f: &mut impl FnMut(&'a DirectedEdge, &[&'a BoxName]),
        ) {
            for it in &t.items {
                match it {
                    Item::Edge(e) => {
                        let ctx: Vec<&BoxName> = stack.iter().rev().copied().collect();
                        f(e, &ctx);
                    }
                    Item::Group(g) => {
                        stack.push(&g.boxname);
                        go(&g.body, stack, f);
                        stack.pop();
                    }
                }
            }
        }
        go(self, &mut Vec::new(), f)
    }

    pub fn edges(&self) -> Vec<&DirectedEdge> {
        let mut out = Vec::new();
        self.for_each_edge(&mut |e, _| out.push(e));
        out
    }

    pub fn map_edges(&self, f: &mut impl FnMut(&DirectedEdge) -> DirectedEdge) -> EdgeTerm {
        EdgeTerm {
            items: self
                .items
                .iter()
                .map(|it| match it {
                    Item::Edge(e) => Item::Edge(f(e)),
                    Item::Group(g) => Item::Group(Group {
                        orientation: g.orientation,
                        boxname: g.boxname.clone(),
                        body: g.body.map_edges(f),
                    }),
                })
                .collect(),
        }
    }

    pub fn map_boxes(&self, f: &mut impl FnMut(&BoxName) -> BoxName) -> EdgeTerm {
        EdgeTerm {
            items: self
                .items
                .iter()
                .map(|it| match it {
                    Item::Edge(e) => Item::Edge(e.clone()),
                    Item::Group(g) => Item::Group(Group {
                        orientation: g.orientation,
                        boxname: f(&g.boxname),
                        body: g.body.map_boxes(f),
                    }),
                })
                .collect(),
        }
    }

    pub fn group_boxes(&self, out: &mut BTreeSet<BoxName>) {
        for it in &self.items {
            if let Item::Group(g) = it {
                out.insert(g.boxname.clone());
                g.body.group_boxes(out);
            }
        }
    }

    pub fn has_groups(&self) -> bool {
        self.items.iter().any(|i| matches!(i, Item::Group(_)))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Factor {
    /// The empty tensor `1`.
    Empty,
    /// `id{+out -inp}`.
    Id {
        out: EdgeName,
        inp: EdgeName,
    },
    Gen {
        name: String,
        eterm: EdgeTerm,
    },
    Box {
        name: BoxName,
        body: TensorExpr,
    },
}

impl Factor {
    pub fn gen(name: impl Into<String>, items: Vec<Item>) -> Self {
        Factor::Gen {
            name: name.into(),
            eterm: EdgeTerm::new(items),
        }
    }

    pub fn boxed(name: BoxName, body: TensorExpr) -> Self {
        Factor::Box { name, body }
    }
}

/// A product of factors. Factor order is representational only; equivalence
/// treats the product as a multiset.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TensorExpr {
    pub factors: Vec<Factor>,
}

/// A directed-edge occurrence together with the position data needed by the
/// context computations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Occurrence {
    pub edge: DirectedEdge,
    /// Groups enclosing the edge in its edgeterm, innermost first.
    pub ectx: Vec<BoxName>,
    /// Box factors enclosing the node, innermost first.
    pub nctx: Vec<BoxName>,
    /// Index path of the node through the factor tree.
    pub path: Vec<usize>,
}

/// Ways to see a generator or identity occurrence during traversal.
pub enum NodeRef<'a> {
    Id {
        out: &'a EdgeName,
        inp: &'a EdgeName,
    },
    Gen {
        name: &'a str,
        eterm: &'a EdgeTerm,
    },
}

impl TensorExpr {
    pub fn new(factors: Vec<Factor>) -> Self {
        Self { factors }
    }

    pub fn one() -> Self {
        Self {
            factors: vec![Factor::Empty],
        }
    }

    /// Visit every generator or identity together with its enclosing boxes
    /// (innermost first) and its index path.
    pub fn for_each_node<'a>(&'a self, f: &mut impl FnMut(NodeRef<'a>, &[&'a BoxName], &[usize])) {
        fn go<'a>(
            g: &'a TensorExpr,
            boxes: &mut Vec<&'a BoxName>,
            path: &mut Vec<usize>,
            f: &mut impl FnMut(NodeRef<'a>, &[&'a BoxName], &[usize]),
        ) {
            for (i, fac) in g.factors.iter().enumerate() {
                path.push(i);
                match fac {
                    Factor::Empty => {}
                    Factor::Id { out, inp } => {
                        let ctx: Vec<&BoxName> = boxes.iter().rev().copied().collect();
                        f(NodeRef::Id { out, inp }, &ctx, path);
                    }
                    Factor::Gen { name, eterm } => {
                        let ctx: Vec<&BoxName> = boxes.iter().rev().copied().collect();
                        f(NodeRef::Gen { name, eterm }, &ctx, path);
                    }
                    Factor::Box { name, body } => {
                        boxes.push(name);
                        go(body, boxes, path, f);
                        boxes.pop();
                    }
                }
                path.pop();
            }
        }
        go(self, &mut Vec::new(), &mut Vec::new(), f)
    }

    /// All directed-edge occurrences in traversal order.
    pub fn occurrences(&self) -> Vec<Occurrence> {
        let mut out = Vec::new();
        self.for_each_node(&mut |node, boxes, path| {
            let nctx: Vec<BoxName> = boxes.iter().map(|b| (*b).clone()).collect();
            match node {
                NodeRef::Id { out: o, inp } => {
                    for e in [DirectedEdge::out(o.clone()), DirectedEdge::inp(inp.clone())] {
                        out.push(Occurrence {
                            edge: e,
                            ectx: vec![],
                            nctx: nctx.clone(),
                            path: path.to_vec(),
                        });
                    }
                }
                NodeRef::Gen { eterm, .. } => eterm.for_each_edge(&mut |e, groups| {
                    out.push(Occurrence {
                        edge: e.clone(),
                        ectx: groups.iter().map(|b| (*b).clone()).collect(),
                        nctx: nctx.clone(),
                        path: path.to_vec(),
                    })
                }),
            }
        });
        out
    }

    /// Box names introduced by Box factors.
    pub fn boxes(&self) -> BTreeSet<BoxName> {
        let mut out = BTreeSet::new();
        self.for_each_box(&mut |b, _| {
            out.insert(b.clone());
        });
        out
    }

    /// Box names occurring anywhere, as Box factors or as group labels.
    pub fn all_box_names(&self) -> BTreeSet<BoxName> {
        let mut out = self.boxes();
        self.for_each_node(&mut |node, _, _| {
            if let NodeRef::Gen { eterm, .. } = node {
                eterm.group_boxes(&mut out);
            }
        });
        out
    }

    /// Visit every Box factor with its parent box, if any.
    pub fn for_each_box<'a>(&'a self, f: &mut impl FnMut(&'a BoxName, Option<&'a BoxName>)) {
        fn go<'a>(
            g: &'a TensorExpr,
            parent: Option<&'a BoxName>,
            f: &mut impl FnMut(&'a BoxName, Option<&'a BoxName>),
        ) {
            for fac in &g.factors {
                if let Factor::Box { name, body } = fac {
                    f(name, parent);
                    go(body, Some(name), f);
                }
            }
        }
        go(self, None, f)
    }

    /// Every edge name occurring, bound or free.
    pub fn edge_names(&self) -> BTreeSet<EdgeName> {
        self.occurrences()
            .into_iter()
            .map(|o| o.edge.name)
            .collect()
    }

    /// Directed edges whose partner does not occur.
    pub fn free_edges(&self) -> BTreeSet<DirectedEdge> {
        let all: BTreeSet<DirectedEdge> = self.occurrences().into_iter().map(|o| o.edge).collect();
        all.iter()
            .filter(|e| !all.contains(&e.partner()))
            .cloned()
            .collect()
    }

    /// Edge names occurring in both directions.
    pub fn bound_names(&self) -> BTreeSet<EdgeName> {
        let all: BTreeSet<DirectedEdge> = self.occurrences().into_iter().map(|o| o.edge).collect();
        all.iter()
            .filter(|e| e.dir == Direction::Out && all.contains(&e.partner()))
            .map(|e| e.name.clone())
            .collect()
    }

    pub fn free_names(&self) -> BTreeSet<EdgeName> {
        self.free_edges().into_iter().map(|e| e.name).collect()
    }

    /// Apply `f` to every directed edge occurrence.
    pub fn map_edges(&self, f: &mut impl FnMut(&DirectedEdge) -> DirectedEdge) -> TensorExpr {
        TensorExpr {
            factors: self
                .factors
                .iter()
                .map(|fac| match fac {
                    Factor::Empty => Factor::Empty,
                    Factor::Id { out, inp } => Factor::Id {
                        out: f(&DirectedEdge::out(out.clone())).name,
                        inp: f(&DirectedEdge::inp(inp.clone())).name,
                    },
                    Factor::Gen { name, eterm } => Factor::Gen {
                        name: name.clone(),
                        eterm: eterm.map_edges(f),
                    },
                    Factor::Box { name, body } => Factor::Box {
                        name: name.clone(),
                        body: body.map_edges(f),
                    },
                })
                .collect(),
        }
    }

    /// Apply `f` to every edge name regardless of direction.
    pub fn map_edge_names(&self, f: &mut impl FnMut(&EdgeName) -> EdgeName) -> TensorExpr {
        self.map_edges(&mut |e| DirectedEdge {
            name: f(&e.name),
            dir: e.dir,
        })
    }

    /// Apply `f` to every box name, in Box factors and group labels alike.
    pub fn map_boxes(&self, f: &mut impl FnMut(&BoxName) -> BoxName) -> TensorExpr {
        TensorExpr {
            factors: self
                .factors
                .iter()
                .map(|fac| match fac {
                    Factor::Empty | Factor::Id { .. } => fac.clone(),
                    Factor::Gen { name, eterm } => Factor::Gen {
                        name: name.clone(),
                        eterm: eterm.map_boxes(f),
                    },
                    Factor::Box { name, body } => Factor::Box {
                        name: f(name),
                        body: body.map_boxes(f),
                    },
                })
                .collect(),
        }
    }

    /// Product of two expressions (plain concatenation of factor lists).
    pub fn product(&self, other: &TensorExpr) -> TensorExpr {
        let mut factors = self.factors.clone();
        factors.extend(other.factors.iter().cloned());
        TensorExpr { factors }
    }

    /// The body of Box factor `b`, wherever it is nested.
    pub fn find_box(&self, b: &BoxName) -> Option<&TensorExpr> {
        for fac in &self.factors {
            if let Factor::Box { name, body } = fac {
                if name == b {
                    return Some(body);
                }
                if let Some(found) = body.find_box(b) {
                    return Some(found);
                }
            }
        }
        None
    }

    /// Top-level Box factor names in order of appearance.
    pub fn top_level_boxes(&self) -> Vec<BoxName> {
        self.factors
            .iter()
            .filter_map(|f| match f {
                Factor::Box { name, .. } => Some(name.clone()),
                _ => None,
            })
            .collect()
    }

    /// True iff no Box factor and no edge group occurs.
    pub fn is_concrete(&self) -> bool {
        self.factors.iter().all(|f| match f {
            Factor::Box { .. } => false,
            Factor::Gen { eterm, .. } => !eterm.has_groups(),
            _ => true,
        })
    }

    /// Count of generator and identity nodes, ignoring `1`.
    pub fn node_count(&self) -> usize {
        let mut n = 0;
        self.for_each_node(&mut |_, _, _| n += 1);
        n
    }
}

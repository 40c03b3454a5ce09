//! Seeded generator of small well-formed !-tensors and equivalent variants.
//!
//! Edges are only drawn between nodes whose box paths are nested one inside
//! the other. The endpoint in the outer node receives the groups `Q ++ P`,
//! where `P` lists the boxes separating the two nodes, and the inner endpoint
//! receives `Q`, a chain of boxes nested inside the inner node's container.
//! That shape satisfies every context condition by construction. The output
//! is still filtered through the checker.

#![allow(dead_code)]

use bangtensor::{
    check_wellformed, BoxName, DirectedEdge, EdgeName, EdgeTerm, Factor, Group, Item, Orientation,
    TensorExpr,
};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;
pub type Rng8 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng8 {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Clone, Debug)]
struct BoxSpec {
    name: BoxName,
    parent: Option<usize>,
}

#[derive(Clone, Debug)]
enum Kind {
    Gen(String),
    Id,
}

#[derive(Clone, Debug)]
struct Slot {
    edge: DirectedEdge,
    /// Groups wrapping the edge, innermost first, each with an orientation.
    groups: Vec<(usize, Orientation)>,
}

#[derive(Clone, Debug)]
struct Node {
    kind: Kind,
    container: Option<usize>,
    slots: Vec<Slot>,
}

pub struct Limits {
    pub max_leaves: usize,
    pub max_boxes: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Self {
            max_leaves: 6,
            max_boxes: 3,
        }
    }
}

struct Builder {
    boxes: Vec<BoxSpec>,
    nodes: Vec<Node>,
    next_edge: usize,
}

impl Builder {
    /// Box path of a container, innermost first.
    fn chain(&self, c: Option<usize>) -> Vec<usize> {
        let mut out = Vec::new();
        let mut cur = c;
        while let Some(b) = cur {
            out.push(b);
            cur = self.boxes[b].parent;
        }
        out
    }

    fn children(&self, c: Option<usize>) -> Vec<usize> {
        (0..self.boxes.len())
            .filter(|&b| self.boxes[b].parent == c)
            .collect()
    }

    /// A random chain `Q` of boxes strictly inside container `c`, innermost
    /// first, possibly empty.
    fn inner_chain(&self, r: &mut Rng8, c: Option<usize>) -> Vec<usize> {
        let mut q = Vec::new();
        let mut cur = c;
        while r.gen_bool(0.35) {
            let kids = self.children(cur);
            let Some(&k) = kids.choose(r) else { break };
            q.push(k);
            cur = Some(k);
        }
        q.reverse();
        q
    }

    fn fresh(&mut self) -> EdgeName {
        self.next_edge += 1;
        EdgeName::new(format!("e{}", self.next_edge)).unwrap()
    }

    fn orient(r: &mut Rng8) -> Orientation {
        if r.gen_bool(0.5) {
            Orientation::Clockwise
        } else {
            Orientation::Anticlockwise
        }
    }

    fn wrap(r: &mut Rng8, boxes: &[usize]) -> Vec<(usize, Orientation)> {
        boxes.iter().map(|&b| (b, Self::orient(r))).collect()
    }

    fn is_id(&self, n: usize) -> bool {
        matches!(self.nodes[n].kind, Kind::Id)
    }

    /// Try to connect nodes `a` and `b` by a fresh bound edge.
    fn connect(&mut self, r: &mut Rng8, a: usize, b: usize, a_out: bool) -> bool {
        let ca = self.chain(self.nodes[a].container);
        let cb = self.chain(self.nodes[b].container);
        // Determine which node is outer.
        let (outer, inner, p_len) = if cb.ends_with(&ca) {
            (a, b, cb.len() - ca.len())
        } else if ca.ends_with(&cb) {
            (b, a, ca.len() - cb.len())
        } else {
            return false;
        };
        let inner_chain = self.chain(self.nodes[inner].container);
        let p: Vec<usize> = inner_chain[..p_len].to_vec();
        let q = if self.is_id(inner) || self.is_id(outer) {
            vec![]
        } else {
            self.inner_chain(r, self.nodes[inner].container)
        };
        if self.is_id(outer) && !p.is_empty() {
            return false;
        }
        let name = self.fresh();
        let mut outer_groups = q.clone();
        outer_groups.extend(p);
        let og = Self::wrap(r, &outer_groups);
        let ig = Self::wrap(r, &q);
        let outer_is_a = outer == a;
        let outer_out = if outer_is_a { a_out } else { !a_out };
        let mk = |out: bool| {
            if out {
                DirectedEdge::out(name.clone())
            } else {
                DirectedEdge::inp(name.clone())
            }
        };
        self.nodes[outer].slots.push(Slot {
            edge: mk(outer_out),
            groups: og,
        });
        self.nodes[inner].slots.push(Slot {
            edge: mk(!outer_out),
            groups: ig,
        });
        true
    }

    fn add_free(&mut self, r: &mut Rng8, n: usize, out: bool) {
        let name = self.fresh();
        let q = if self.is_id(n) {
            vec![]
        } else {
            self.inner_chain(r, self.nodes[n].container)
        };
        let groups = Self::wrap(r, &q);
        let edge = if out {
            DirectedEdge::out(name)
        } else {
            DirectedEdge::inp(name)
        };
        self.nodes[n].slots.push(Slot { edge, groups });
    }

    fn build_item(&self, slot: &Slot) -> Item {
        let mut item = Item::Edge(slot.edge.clone());
        for &(b, o) in &slot.groups {
            item = Item::Group(Group {
                orientation: o,
                boxname: self.boxes[b].name.clone(),
                body: EdgeTerm::new(vec![item]),
            });
        }
        item
    }

    fn factor(&self, n: usize, r: &mut Rng8) -> Factor {
        let node = &self.nodes[n];
        match &node.kind {
            Kind::Id => {
                let out = node
                    .slots
                    .iter()
                    .find(|s| s.edge.dir == bangtensor::Direction::Out)
                    .unwrap();
                let inp = node
                    .slots
                    .iter()
                    .find(|s| s.edge.dir == bangtensor::Direction::In)
                    .unwrap();
                Factor::Id {
                    out: out.edge.name.clone(),
                    inp: inp.edge.name.clone(),
                }
            }
            Kind::Gen(name) => {
                let mut items: Vec<Item> = node.slots.iter().map(|s| self.build_item(s)).collect();
                items.shuffle(r);
                Factor::Gen {
                    name: name.clone(),
                    eterm: EdgeTerm::new(items),
                }
            }
        }
    }

    fn tensor(&self, c: Option<usize>, r: &mut Rng8) -> TensorExpr {
        let mut factors: Vec<Factor> = (0..self.nodes.len())
            .filter(|&n| self.nodes[n].container == c)
            .map(|n| self.factor(n, r))
            .collect();
        for b in self.children(c) {
            factors.push(Factor::Box {
                name: self.boxes[b].name.clone(),
                body: self.tensor(Some(b), r),
            });
        }
        if factors.is_empty() {
            factors.push(Factor::Empty);
        }
        factors.shuffle(r);
        TensorExpr::new(factors)
    }
}

/// One random well-formed !-tensor.
pub fn random_tensor(r: &mut Rng8, limits: &Limits) -> TensorExpr {
    loop {
        if let Some(g) = attempt(r, limits) {
            if check_wellformed(&g).is_ok() {
                return g;
            }
        }
    }
}

fn attempt(r: &mut Rng8, limits: &Limits) -> Option<TensorExpr> {
    let names = ["A", "B", "C"];
    let nboxes = r.gen_range(0..=limits.max_boxes.min(3));
    let mut boxes: Vec<BoxSpec> = Vec::new();
    for (i, name) in names.iter().enumerate().take(nboxes) {
        // Nesting depth at most two: a parent must be top level.
        let tops: Vec<usize> = (0..i).filter(|&b| boxes[b].parent.is_none()).collect();
        let parent = if !tops.is_empty() && r.gen_bool(0.4) {
            tops.choose(r).copied()
        } else {
            None
        };
        boxes.push(BoxSpec {
            name: BoxName::new(*name).unwrap(),
            parent,
        });
    }
    let nleaves = r.gen_range(1..=limits.max_leaves);
    let mut b = Builder {
        boxes,
        nodes: vec![],
        next_edge: 0,
    };
    for _ in 0..nleaves {
        let container = if b.boxes.is_empty() || r.gen_bool(0.4) {
            None
        } else {
            Some(r.gen_range(0..b.boxes.len()))
        };
        let kind = if r.gen_bool(0.2) {
            Kind::Id
        } else {
            Kind::Gen(["f", "g", "h"].choose(r).unwrap().to_string())
        };
        b.nodes.push(Node {
            kind,
            container,
            slots: vec![],
        });
    }
    // Identities first: each needs one output and one input.
    for n in 0..b.nodes.len() {
        if !b.is_id(n) {
            continue;
        }
        for out in [true, false] {
            let partners: Vec<usize> = (0..b.nodes.len())
                .filter(|&m| m != n && !b.is_id(m))
                .collect();
            let linked = match partners.choose(r) {
                Some(&m) if r.gen_bool(0.7) => b.connect(r, n, m, out),
                _ => false,
            };
            if !linked {
                b.add_free(r, n, out);
            }
        }
    }
    let gens: Vec<usize> = (0..b.nodes.len()).filter(|&n| !b.is_id(n)).collect();
    if !gens.is_empty() {
        for _ in 0..r.gen_range(0..=4) {
            let x = *gens.choose(r).unwrap();
            let y = *gens.choose(r).unwrap();
            let out = r.gen_bool(0.5);
            b.connect(r, x, y, out);
        }
        for _ in 0..r.gen_range(0..=3) {
            let x = *gens.choose(r).unwrap();
            let out = r.gen_bool(0.5);
            b.add_free(r, x, out);
        }
    }
    Some(b.tensor(None, r))
}

// ---------------------------------------------------------------------------
// Equivalence-preserving perturbations

fn shuffle_products(g: &TensorExpr, r: &mut Rng8) -> TensorExpr {
    let mut factors: Vec<Factor> = g
        .factors
        .iter()
        .map(|f| match f {
            Factor::Box { name, body } => Factor::Box {
                name: name.clone(),
                body: shuffle_products(body, r),
            },
            other => other.clone(),
        })
        .collect();
    factors.shuffle(r);
    TensorExpr::new(factors)
}

fn sprinkle_units(g: &TensorExpr, r: &mut Rng8) -> TensorExpr {
    let mut factors: Vec<Factor> = g
        .factors
        .iter()
        .map(|f| match f {
            Factor::Box { name, body } => Factor::Box {
                name: name.clone(),
                body: sprinkle_units(body, r),
            },
            other => other.clone(),
        })
        .collect();
    if r.gen_bool(0.3) {
        let at = r.gen_range(0..=factors.len());
        factors.insert(at, Factor::Empty);
    }
    TensorExpr::new(factors)
}

fn rename_bound(g: &TensorExpr, r: &mut Rng8) -> TensorExpr {
    let bound = g.bound_names();
    let mut targets: Vec<usize> = (0..bound.len()).collect();
    targets.shuffle(r);
    let map: std::collections::BTreeMap<EdgeName, EdgeName> = bound
        .into_iter()
        .zip(targets)
        .map(|(a, k)| (a, EdgeName::new(format!("r{k}")).unwrap()))
        .collect();
    g.map_edge_names(&mut |e| map.get(e).cloned().unwrap_or_else(|| e.clone()))
}

fn add_empty_group(g: &TensorExpr, r: &mut Rng8) -> TensorExpr {
    let boxes: Vec<BoxName> = g.boxes().into_iter().collect();
    let Some(b) = boxes.choose(r).cloned() else {
        return g.clone();
    };
    let mut done = false;
    fn go(g: &TensorExpr, b: &BoxName, o: Orientation, done: &mut bool) -> TensorExpr {
        TensorExpr::new(
            g.factors
                .iter()
                .map(|f| match f {
                    Factor::Gen { name, eterm } if !*done => {
                        *done = true;
                        let mut items = eterm.items.clone();
                        items.push(Item::Group(Group {
                            orientation: o,
                            boxname: b.clone(),
                            body: EdgeTerm::default(),
                        }));
                        Factor::Gen {
                            name: name.clone(),
                            eterm: EdgeTerm::new(items),
                        }
                    }
                    Factor::Box { name, body } => Factor::Box {
                        name: name.clone(),
                        body: go(body, b, o, done),
                    },
                    other => other.clone(),
                })
                .collect(),
        )
    }
    go(g, &b, Builder::orient(r), &mut done)
}

/// Split one ungrouped endpoint with an identity wire placed beside it.
fn insert_identity(g: &TensorExpr, r: &mut Rng8) -> TensorExpr {
    let occ: Vec<_> = g
        .occurrences()
        .into_iter()
        .filter(|o| o.ectx.is_empty())
        .collect();
    let Some(o) = occ.choose(r) else {
        return g.clone();
    };
    let z = EdgeName::new(format!("z{}", r.gen_range(0..1000))).unwrap();
    if g.edge_names().contains(&z) {
        return g.clone();
    }
    let target = o.edge.clone();
    let path = o.path.clone();
    let renamed = g.map_edges(&mut |e| {
        if *e == target {
            DirectedEdge {
                name: z.clone(),
                dir: e.dir,
            }
        } else {
            e.clone()
        }
    });
    let wire = match target.dir {
        bangtensor::Direction::Out => Factor::Id {
            out: target.name.clone(),
            inp: z,
        },
        bangtensor::Direction::In => Factor::Id {
            out: z,
            inp: target.name.clone(),
        },
    };
    fn insert(g: &TensorExpr, path: &[usize], f: Factor) -> TensorExpr {
        let mut out = g.clone();
        if path.len() == 1 {
            out.factors.push(f);
        } else if let Factor::Box { body, .. } = &mut out.factors[path[0]] {
            *body = insert(body, &path[1..], f);
        }
        out
    }
    insert(&renamed, &path, wire)
}

/// An expression equivalent to `g`, built from random perturbations.
pub fn perturb(g: &TensorExpr, r: &mut Rng8) -> TensorExpr {
    let mut h = g.clone();
    if r.gen_bool(0.5) {
        h = insert_identity(&h, r);
    }
    if r.gen_bool(0.3) {
        h = insert_identity(&h, r);
    }
    if r.gen_bool(0.4) {
        h = add_empty_group(&h, r);
    }
    h = sprinkle_units(&h, r);
    h = rename_bound(&h, r);
    shuffle_products(&h, r)
}

/// A random complete Exp/Kill instantiation driven by the live box set.
pub fn random_instantiation(
    g: &TensorExpr,
    r: &mut Rng8,
    max_exp: usize,
) -> Vec<bangtensor::boxops::BoxOp> {
    use bangtensor::boxops::{BoxOp, OpKind};
    use bangtensor::instantiate::apply_instantiation;
    let mut ops = Vec::new();
    let mut cur = g.clone();
    let mut budget: std::collections::BTreeMap<BoxName, usize> = Default::default();
    loop {
        let live: Vec<BoxName> = cur.boxes().into_iter().collect();
        let Some(b) = live.choose(r).cloned() else {
            break;
        };
        let used = budget.entry(b.clone()).or_insert(0);
        let op = if *used < max_exp && r.gen_bool(0.5) {
            *used += 1;
            BoxOp::new(OpKind::Exp, b)
        } else {
            BoxOp::new(OpKind::Kill, b)
        };
        cur = apply_instantiation(std::slice::from_ref(&op), &cur).unwrap();
        ops.push(op);
    }
    ops
}

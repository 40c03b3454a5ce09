//! Instantiation sequences, their KE normal form, and bounded instance sets.
//!
//! An instantiation is a sequence of Exp and Kill operations applied with the
//! deterministic freshness function of the current expression(s). When several
//! sides are instantiated together (the two sides of an equation) one
//! freshness function avoiding all of them is shared by every step.
//!
//! The normal form is computed by replaying the sequence while recording the
//! provenance of every !-box occurrence. Each occurrence gets a node holding
//! the boxes it was created with and the list of expansion events applied to
//! it. Expanding a box deep-clones the nodes of everything inside it, because
//! a copy inherits the state of its source at copy time. Reading the events
//! back in KE order yields the normal form directly.

use std::collections::{BTreeMap, BTreeSet};

use crate::boxops::{apply_op, fresh_for, BoxOp, FreshnessFunction, OpError, OpKind};
use crate::expr::{Factor, TensorExpr};
use crate::names::{BoxName, EdgeName};
use crate::normalize::{normalize_anon, normalize_pair};

pub type Instantiation = Vec<BoxOp>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InstError {
    #[error("step {index} ({op}): {source}")]
    Step {
        index: usize,
        op: BoxOp,
        source: OpError,
    },
    #[error("instantiation is incomplete: !-boxes remain")]
    Incomplete,
    #[error("operation {0} is not allowed in an instantiation")]
    NotExpKill(BoxOp),
}

/// Maximum number of expansions of any single box occurrence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct InstanceBound(pub usize);

pub fn is_concrete(g: &TensorExpr) -> bool {
    g.is_concrete()
}

/// Apply one operation to every side with a shared freshness function.
pub fn step(
    op: &BoxOp,
    sides: &[TensorExpr],
) -> Result<(Vec<TensorExpr>, FreshnessFunction), OpError> {
    let mut fr = fresh_for(sides);
    let out = sides
        .iter()
        .map(|g| apply_op(op, &mut fr, g))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((out, fr))
}

pub fn apply_instantiation(i: &[BoxOp], g: &TensorExpr) -> Result<TensorExpr, InstError> {
    Ok(apply_sequence(i, std::slice::from_ref(g))?
        .pop()
        .expect("one side"))
}

/// Apply any sequence of box operations step by step.
pub fn apply_sequence(i: &[BoxOp], sides: &[TensorExpr]) -> Result<Vec<TensorExpr>, InstError> {
    let mut cur = sides.to_vec();
    for (index, op) in i.iter().enumerate() {
        cur = step(op, &cur)
            .map_err(|source| InstError::Step {
                index,
                op: op.clone(),
                source,
            })?
            .0;
    }
    Ok(cur)
}

// ---------------------------------------------------------------------------
// Provenance

#[derive(Clone, Debug)]
enum Event {
    /// One expansion: clones of the node's original children, in order.
    Exp(Vec<usize>),
    /// A copy of the node was split off.
    Splice(usize),
}

#[derive(Clone, Debug)]
struct Node {
    children: Vec<usize>,
    events: Vec<Event>,
}

#[derive(Default)]
struct Arena {
    nodes: Vec<Node>,
}

fn direct_children(body: &TensorExpr) -> Vec<(BoxName, &TensorExpr)> {
    body.factors
        .iter()
        .filter_map(|f| match f {
            Factor::Box { name, body } => Some((name.clone(), body)),
            _ => None,
        })
        .collect()
}

impl Arena {
    fn register(&mut self, body: &TensorExpr, live: &mut BTreeMap<BoxName, usize>) -> Vec<usize> {
        direct_children(body)
            .into_iter()
            .map(|(name, inner)| {
                let children = self.register(inner, live);
                let id = self.nodes.len();
                self.nodes.push(Node {
                    children,
                    events: vec![],
                });
                live.insert(name, id);
                id
            })
            .collect()
    }

    fn clone_deep(&mut self, n: usize, memo: &mut BTreeMap<usize, usize>) -> usize {
        if let Some(&m) = memo.get(&n) {
            return m;
        }
        let id = self.nodes.len();
        self.nodes.push(Node {
            children: vec![],
            events: vec![],
        });
        memo.insert(n, id);
        let src = self.nodes[n].clone();
        let children = src
            .children
            .iter()
            .map(|&c| self.clone_deep(c, memo))
            .collect();
        let events = src
            .events
            .iter()
            .map(|e| match e {
                Event::Exp(cs) => {
                    Event::Exp(cs.iter().map(|&c| self.clone_deep(c, memo)).collect())
                }
                Event::Splice(m) => Event::Splice(self.clone_deep(*m, memo)),
            })
            .collect();
        self.nodes[id] = Node { children, events };
        id
    }

    /// Expansions of `n` in chronological KE order, splices inlined.
    fn flatten(&self, n: usize, out: &mut Vec<Vec<usize>>) {
        for e in &self.nodes[n].events {
            match e {
                Event::Exp(cs) => out.push(cs.clone()),
                Event::Splice(m) => self.flatten(*m, out),
            }
        }
    }
}

fn inner_boxes(g: &TensorExpr, b: &BoxName) -> BTreeSet<BoxName> {
    g.find_box(b).map(|body| body.boxes()).unwrap_or_default()
}

/// Rewrite any complete sequence of Exp, Kill and Copy into KE normal form.
///
/// The result uses only Exp and Kill. At every stage the lexicographically
/// least top-level box is expanded as often as the original sequence
/// (after inlining copies) expanded it, then killed.
pub fn normal_form_sides(i: &[BoxOp], sides: &[TensorExpr]) -> Result<Instantiation, InstError> {
    let mut arena = Arena::default();
    let mut live = BTreeMap::new();
    arena.register(&sides[0], &mut live);
    let initial = live.clone();

    let mut cur = sides.to_vec();
    for (index, op) in i.iter().enumerate() {
        let err = |source| InstError::Step {
            index,
            op: op.clone(),
            source,
        };
        let inside = inner_boxes(&cur[0], &op.target);
        let (next, fr) = step(op, &cur).map_err(err)?;
        let node = *live.get(&op.target).ok_or(InstError::Step {
            index,
            op: op.clone(),
            source: OpError::UnknownBox(op.target.clone()),
        })?;
        match op.kind {
            OpKind::Exp | OpKind::Copy => {
                let mut memo = BTreeMap::new();
                let children: Vec<usize> = arena.nodes[node].children.clone();
                let cloned: Vec<usize> = children
                    .iter()
                    .map(|&c| arena.clone_deep(c, &mut memo))
                    .collect();
                for b in &inside {
                    let src = live[b];
                    let copy = arena.clone_deep(src, &mut memo);
                    let image = fr
                        .box_image(b)
                        .expect("copied boxes have fresh images")
                        .clone();
                    live.insert(image, copy);
                }
                if op.kind == OpKind::Exp {
                    arena.nodes[node].events.push(Event::Exp(cloned));
                } else {
                    let id = arena.nodes.len();
                    arena.nodes.push(Node {
                        children: cloned,
                        events: vec![],
                    });
                    arena.nodes[node].events.push(Event::Splice(id));
                    live.insert(
                        fr.box_image(&op.target)
                            .expect("copy has a fresh name")
                            .clone(),
                        id,
                    );
                }
            }
            OpKind::Kill => {
                live.remove(&op.target);
                for b in &inside {
                    live.remove(b);
                }
            }
            OpKind::Drop => return Err(InstError::NotExpKill(op.clone())),
        }
        cur = next;
    }
    if !cur.iter().all(|g| g.is_concrete()) {
        return Err(InstError::Incomplete);
    }

    // Replay in KE order.
    let mut map = initial;
    let mut cur = sides.to_vec();
    let mut out = Vec::new();
    while let Some(a) = cur[0].top_level_boxes().into_iter().min() {
        let node = map[&a];
        let mut plan = Vec::new();
        arena.flatten(node, &mut plan);
        for entry in plan {
            let op = BoxOp::new(OpKind::Exp, a.clone());
            let body = cur[0].find_box(&a).expect("top-level box exists").clone();
            let (next, fr) = step(&op, &cur).map_err(|source| InstError::Step {
                index: out.len(),
                op: op.clone(),
                source,
            })?;
            assign(&arena, &fr, &body, &entry, &mut map);
            cur = next;
            out.push(op);
        }
        let op = BoxOp::new(OpKind::Kill, a.clone());
        cur = step(&op, &cur)
            .map_err(|source| InstError::Step {
                index: out.len(),
                op: op.clone(),
                source,
            })?
            .0;
        out.push(op);
    }
    Ok(out)
}

fn assign(
    arena: &Arena,
    fr: &FreshnessFunction,
    body: &TensorExpr,
    nodes: &[usize],
    map: &mut BTreeMap<BoxName, usize>,
) {
    for ((name, inner), &n) in direct_children(body).into_iter().zip(nodes) {
        let image = fr
            .box_image(&name)
            .expect("expanded boxes have fresh images")
            .clone();
        map.insert(image, n);
        assign(arena, fr, inner, &arena.nodes[n].children, map);
    }
}

pub fn normal_form(i: &[BoxOp], g: &TensorExpr) -> Result<Instantiation, InstError> {
    normal_form_sides(i, std::slice::from_ref(g))
}

// ---------------------------------------------------------------------------
// Enumeration

/// One concrete instance with the instantiation that produced it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    pub ops: Instantiation,
    pub sides: Vec<TensorExpr>,
}

fn enumerate_sides(
    sides: &[TensorExpr],
    bound: InstanceBound,
    prefix: &mut Instantiation,
    out: &mut Vec<Instance>,
) {
    let Some(a) = sides[0].top_level_boxes().into_iter().min() else {
        out.push(Instance {
            ops: prefix.clone(),
            sides: sides.to_vec(),
        });
        return;
    };
    let exp = BoxOp::new(OpKind::Exp, a.clone());
    let kill = BoxOp::new(OpKind::Kill, a);
    let mut cur = sides.to_vec();
    let depth = prefix.len();
    for k in 0..=bound.0 {
        if k > 0 {
            cur = step(&exp, &cur).expect("top-level box exists").0;
            prefix.push(exp.clone());
        }
        let killed = step(&kill, &cur).expect("top-level box exists").0;
        prefix.push(kill.clone());
        enumerate_sides(&killed, bound, prefix, out);
        prefix.pop();
    }
    prefix.truncate(depth);
}

/// Every KE-ordered complete instantiation within the bound, in a fixed order.
pub fn enumerate_raw(sides: &[TensorExpr], bound: InstanceBound) -> Vec<Instance> {
    let mut out = Vec::new();
    enumerate_sides(sides, bound, &mut Vec::new(), &mut out);
    out
}

/// Concrete instances of `g` up to renaming of freshly generated free names.
pub fn enumerate_instances(g: &TensorExpr, bound: InstanceBound) -> Vec<TensorExpr> {
    let fixed = g.free_names();
    let set: BTreeSet<TensorExpr> = enumerate_raw(std::slice::from_ref(g), bound)
        .into_iter()
        .map(|inst| normalize_anon(&inst.sides[0], &fixed))
        .collect();
    set.into_iter().collect()
}

/// Canonical key of one instance of an equation.
pub fn pair_key(
    l: &TensorExpr,
    r: &TensorExpr,
    fixed: &BTreeSet<EdgeName>,
) -> (TensorExpr, TensorExpr) {
    normalize_pair(l, r, fixed)
}

/// Concrete instances of an equation under shared instantiations, keyed by
/// their canonical pair and keeping one witness each.
pub fn instantiate_pair(
    lhs: &TensorExpr,
    rhs: &TensorExpr,
    bound: InstanceBound,
    fixed: &BTreeSet<EdgeName>,
) -> BTreeMap<(TensorExpr, TensorExpr), Instance> {
    let mut out = BTreeMap::new();
    for inst in enumerate_raw(&[lhs.clone(), rhs.clone()], bound) {
        let key = pair_key(&inst.sides[0], &inst.sides[1], fixed);
        out.entry(key).or_insert(inst);
    }
    out
}

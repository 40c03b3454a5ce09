//! Freshness functions, the four !-box operations, weakening and renaming.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::context::Context;
use crate::expr::{EdgeTerm, Factor, Group, Item, Orientation, TensorExpr};
use crate::names::{BoxName, DirectedEdge, EdgeName};
use crate::wellformed::{violations, Violation};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OpError {
    #[error("unknown !-box {0}")]
    UnknownBox(BoxName),
    #[error("name {0} is already used")]
    NameClash(String),
    #[error("edge {0} is bound and cannot be renamed")]
    BoundName(EdgeName),
    #[error("edge {0} does not occur free")]
    NotFree(EdgeName),
    #[error("result is not well-formed: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    IllFormedResult(Vec<Violation>),
}

/// Deterministic, memoizing freshness function.
///
/// The image of `x` is `base(x).k` for the least `k >= 1` that is unused,
/// where `base` strips one trailing numeric suffix. Produced names are added
/// to the used set so the function stays injective on everything queried.
#[derive(Clone, Debug, Default)]
pub struct FreshnessFunction {
    used_edges: BTreeSet<EdgeName>,
    used_boxes: BTreeSet<BoxName>,
    edges: BTreeMap<EdgeName, EdgeName>,
    boxes: BTreeMap<BoxName, BoxName>,
}

impl FreshnessFunction {
    pub fn avoiding(
        edges: impl IntoIterator<Item = EdgeName>,
        boxes: impl IntoIterator<Item = BoxName>,
    ) -> Self {
        Self {
            used_edges: edges.into_iter().collect(),
            used_boxes: boxes.into_iter().collect(),
            ..Self::default()
        }
    }

    pub fn avoid(&mut self, g: &TensorExpr) {
        self.used_edges.extend(g.edge_names());
        self.used_boxes.extend(g.all_box_names());
    }

    pub fn edge(&mut self, x: &EdgeName) -> EdgeName {
        if let Some(y) = self.edges.get(x) {
            return y.clone();
        }
        let base = x.base().to_string();
        let y = (1..)
            .map(|k| EdgeName::new(format!("{base}.{k}")).expect("suffixing keeps names valid"))
            .find(|c| !self.used_edges.contains(c))
            .expect("unbounded search");
        self.used_edges.insert(y.clone());
        self.edges.insert(x.clone(), y.clone());
        y
    }

    pub fn boxname(&mut self, x: &BoxName) -> BoxName {
        if let Some(y) = self.boxes.get(x) {
            return y.clone();
        }
        let base = x.base().to_string();
        let y = (1..)
            .map(|k| BoxName::new(format!("{base}.{k}")).expect("suffixing keeps names valid"))
            .find(|c| !self.used_boxes.contains(c))
            .expect("unbounded search");
        self.used_boxes.insert(y.clone());
        self.boxes.insert(x.clone(), y.clone());
        y
    }

    /// Force `fr(x) = y`. Used to line up box names across derivations.
    pub fn assign_box(&mut self, x: BoxName, y: BoxName) {
        self.used_boxes.insert(y.clone());
        self.boxes.insert(x, y);
    }

    pub fn assign_edge(&mut self, x: EdgeName, y: EdgeName) {
        self.used_edges.insert(y.clone());
        self.edges.insert(x, y);
    }

    pub fn box_image(&self, x: &BoxName) -> Option<&BoxName> {
        self.boxes.get(x)
    }

    pub fn edge_image(&self, x: &EdgeName) -> Option<&EdgeName> {
        self.edges.get(x)
    }

    pub fn edge_map(&self) -> &BTreeMap<EdgeName, EdgeName> {
        &self.edges
    }

    pub fn box_map(&self) -> &BTreeMap<BoxName, BoxName> {
        &self.boxes
    }

    /// Rename every edge and box name in `g`.
    pub fn apply(&mut self, g: &TensorExpr) -> TensorExpr {
        g.map_edge_names(&mut |e| self.edge(e))
            .map_boxes(&mut |b| self.boxname(b))
    }

    pub fn apply_eterm(&mut self, t: &EdgeTerm) -> EdgeTerm {
        t.map_edges(&mut |e| DirectedEdge {
            name: self.edge(&e.name),
            dir: e.dir,
        })
        .map_boxes(&mut |b| self.boxname(b))
    }
}

/// A freshness function avoiding every name of every listed expression.
pub fn fresh_for<'a>(exprs: impl IntoIterator<Item = &'a TensorExpr>) -> FreshnessFunction {
    let mut fr = FreshnessFunction::default();
    for g in exprs {
        fr.avoid(g);
    }
    fr
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum OpKind {
    Exp,
    Kill,
    Copy,
    Drop,
}

impl fmt::Display for OpKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OpKind::Exp => "exp",
            OpKind::Kill => "kill",
            OpKind::Copy => "copy",
            OpKind::Drop => "drop",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BoxOp {
    pub kind: OpKind,
    pub target: BoxName,
}

impl BoxOp {
    pub fn new(kind: OpKind, target: BoxName) -> Self {
        Self { kind, target }
    }

    pub fn needs_freshness(&self) -> bool {
        matches!(self.kind, OpKind::Exp | OpKind::Copy)
    }
}

impl fmt::Display for BoxOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.kind, self.target)
    }
}

fn known(b: &BoxName, g: &TensorExpr) -> Result<(), OpError> {
    if g.all_box_names().contains(b) {
        Ok(())
    } else {
        Err(OpError::UnknownBox(b.clone()))
    }
}

fn op_eterm(kind: OpKind, b: &BoxName, fr: &mut FreshnessFunction, t: &EdgeTerm) -> EdgeTerm {
    let mut items = Vec::with_capacity(t.items.len());
    for it in &t.items {
        let g = match it {
            Item::Edge(_) => {
                items.push(it.clone());
                continue;
            }
            Item::Group(g) => g,
        };
        if &g.boxname != b {
            items.push(Item::Group(Group {
                orientation: g.orientation,
                boxname: g.boxname.clone(),
                body: op_eterm(kind, b, fr, &g.body),
            }));
            continue;
        }
        match kind {
            OpKind::Kill => {}
            OpKind::Drop => items.extend(g.body.items.iter().cloned()),
            OpKind::Exp => {
                let copy = fr.apply_eterm(&g.body);
                match g.orientation {
                    Orientation::Clockwise => {
                        items.push(it.clone());
                        items.extend(copy.items);
                    }
                    Orientation::Anticlockwise => {
                        items.extend(copy.items);
                        items.push(it.clone());
                    }
                }
            }
            OpKind::Copy => {
                let copy = Item::Group(Group {
                    orientation: g.orientation,
                    boxname: fr.boxname(b),
                    body: fr.apply_eterm(&g.body),
                });
                match g.orientation {
                    Orientation::Clockwise => {
                        items.push(it.clone());
                        items.push(copy);
                    }
                    Orientation::Anticlockwise => {
                        items.push(copy);
                        items.push(it.clone());
                    }
                }
            }
        }
    }
    EdgeTerm { items }
}

fn op_tensor(kind: OpKind, b: &BoxName, fr: &mut FreshnessFunction, g: &TensorExpr) -> TensorExpr {
    let mut factors = Vec::with_capacity(g.factors.len());
    for f in &g.factors {
        match f {
            Factor::Empty | Factor::Id { .. } => factors.push(f.clone()),
            Factor::Gen { name, eterm } => factors.push(Factor::Gen {
                name: name.clone(),
                eterm: op_eterm(kind, b, fr, eterm),
            }),
            Factor::Box { name, body } if name == b => match kind {
                OpKind::Kill => {}
                OpKind::Drop => factors.extend(
                    body.factors
                        .iter()
                        .filter(|x| **x != Factor::Empty)
                        .cloned(),
                ),
                OpKind::Exp => {
                    factors.push(f.clone());
                    factors.extend(
                        fr.apply(body)
                            .factors
                            .into_iter()
                            .filter(|x| *x != Factor::Empty),
                    );
                }
                OpKind::Copy => {
                    factors.push(f.clone());
                    factors.push(Factor::Box {
                        name: fr.boxname(b),
                        body: fr.apply(body),
                    });
                }
            },
            Factor::Box { name, body } => factors.push(Factor::Box {
                name: name.clone(),
                body: op_tensor(kind, b, fr, body),
            }),
        }
    }
    if factors.is_empty() {
        factors.push(Factor::Empty);
    }
    TensorExpr { factors }
}

/// Apply `op` using `fr` for the fresh names it needs.
///
/// The freshness function must already avoid every name of `g`; callers
/// sharing one function across the sides of an equation get identical names
/// on both sides.
pub fn apply_op(
    op: &BoxOp,
    fr: &mut FreshnessFunction,
    g: &TensorExpr,
) -> Result<TensorExpr, OpError> {
    known(&op.target, g)?;
    fr.avoid(g);
    Ok(op_tensor(op.kind, &op.target, fr, g))
}

pub fn kill_box(b: &BoxName, g: &TensorExpr) -> Result<TensorExpr, OpError> {
    apply_op(
        &BoxOp::new(OpKind::Kill, b.clone()),
        &mut FreshnessFunction::default(),
        g,
    )
}

pub fn drop_box(b: &BoxName, g: &TensorExpr) -> Result<TensorExpr, OpError> {
    apply_op(
        &BoxOp::new(OpKind::Drop, b.clone()),
        &mut FreshnessFunction::default(),
        g,
    )
}

pub fn exp_box(
    b: &BoxName,
    fr: &mut FreshnessFunction,
    g: &TensorExpr,
) -> Result<TensorExpr, OpError> {
    apply_op(&BoxOp::new(OpKind::Exp, b.clone()), fr, g)
}

pub fn copy_box(
    b: &BoxName,
    fr: &mut FreshnessFunction,
    g: &TensorExpr,
) -> Result<TensorExpr, OpError> {
    apply_op(&BoxOp::new(OpKind::Copy, b.clone()), fr, g)
}

fn weaken_in(a: &BoxName, k: &TensorExpr, g: &TensorExpr) -> TensorExpr {
    TensorExpr {
        factors: g
            .factors
            .iter()
            .map(|f| match f {
                Factor::Box { name, body } if name == a => Factor::Box {
                    name: name.clone(),
                    body: body.product(k),
                },
                Factor::Box { name, body } => Factor::Box {
                    name: name.clone(),
                    body: weaken_in(a, k, body),
                },
                other => other.clone(),
            })
            .collect(),
    }
}

/// Append `k` inside box `a`: `[G]A` becomes `[G K]A`.
pub fn weaken(a: &BoxName, k: &TensorExpr, g: &TensorExpr) -> Result<TensorExpr, OpError> {
    if !g.boxes().contains(a) {
        return Err(OpError::UnknownBox(a.clone()));
    }
    let out = weaken_in(a, k, g);
    let v = violations(&out);
    if v.is_empty() {
        Ok(out)
    } else {
        Err(OpError::IllFormedResult(v))
    }
}

/// Substitute the free edge name `a` by the unused name `b`.
pub fn rename_edge(a: &EdgeName, b: &EdgeName, g: &TensorExpr) -> Result<TensorExpr, OpError> {
    if g.bound_names().contains(a) {
        return Err(OpError::BoundName(a.clone()));
    }
    if !g.free_names().contains(a) {
        return Err(OpError::NotFree(a.clone()));
    }
    if a != b && g.edge_names().contains(b) {
        return Err(OpError::NameClash(b.to_string()));
    }
    Ok(g.map_edge_names(&mut |e| if e == a { b.clone() } else { e.clone() }))
}

/// Substitute the box name `a` by the unused name `b`.
pub fn rename_box(a: &BoxName, b: &BoxName, g: &TensorExpr) -> Result<TensorExpr, OpError> {
    let names = g.all_box_names();
    if !names.contains(a) {
        return Err(OpError::UnknownBox(a.clone()));
    }
    if a != b && names.contains(b) {
        return Err(OpError::NameClash(b.to_string()));
    }
    Ok(g.map_boxes(&mut |x| if x == a { b.clone() } else { x.clone() }))
}

/// Predicted contexts of an edge after an operation.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ContextPrediction {
    /// Contexts of `a` itself, or `None` if the operation deletes it.
    pub original: Option<(Context, Context)>,
    /// Contexts of `fr(a)`, when the operation creates it.
    pub fresh: Option<(Context, Context)>,
}

/// The context table for one edge with contexts `(ectx, nctx)`.
///
/// `fr` must be the freshness function used by the operation so primed names
/// can be looked up. Unlisted combinations leave contexts unchanged.
pub fn contexts_after(
    op: &BoxOp,
    fr: &FreshnessFunction,
    ectx: &[BoxName],
    nctx: &[BoxName],
) -> ContextPrediction {
    let b = &op.target;
    let prime = |x: &BoxName| fr.box_image(x).cloned().unwrap_or_else(|| x.clone());
    let same = Some((ectx.to_vec(), nctx.to_vec()));
    let ei = ectx.iter().position(|x| x == b);
    let ni = nctx.iter().position(|x| x == b);
    match (op.kind, ei, ni) {
        (_, None, None) => ContextPrediction {
            original: same,
            fresh: None,
        },
        (OpKind::Kill, _, _) => ContextPrediction {
            original: None,
            fresh: None,
        },
        (OpKind::Drop, Some(i), _) => {
            let mut e = ectx.to_vec();
            e.remove(i);
            ContextPrediction {
                original: Some((e, nctx.to_vec())),
                fresh: None,
            }
        }
        (OpKind::Drop, None, Some(i)) => {
            let mut n = nctx.to_vec();
            n.remove(i);
            ContextPrediction {
                original: Some((ectx.to_vec(), n)),
                fresh: None,
            }
        }
        (OpKind::Exp, Some(i), _) => {
            let e = ectx[..i]
                .iter()
                .map(prime)
                .chain(ectx[i + 1..].iter().cloned())
                .collect();
            ContextPrediction {
                original: same,
                fresh: Some((e, nctx.to_vec())),
            }
        }
        (OpKind::Exp, None, Some(i)) => {
            let e = ectx.iter().map(prime).collect();
            let n = nctx[..i]
                .iter()
                .map(prime)
                .chain(nctx[i + 1..].iter().cloned())
                .collect();
            ContextPrediction {
                original: same,
                fresh: Some((e, n)),
            }
        }
        (OpKind::Copy, Some(i), _) => {
            let e = ectx[..=i]
                .iter()
                .map(prime)
                .chain(ectx[i + 1..].iter().cloned())
                .collect();
            ContextPrediction {
                original: same,
                fresh: Some((e, nctx.to_vec())),
            }
        }
        (OpKind::Copy, None, Some(i)) => {
            let e = ectx.iter().map(prime).collect();
            let n = nctx[..=i]
                .iter()
                .map(prime)
                .chain(nctx[i + 1..].iter().cloned())
                .collect();
            ContextPrediction {
                original: same,
                fresh: Some((e, n)),
            }
        }
    }
}

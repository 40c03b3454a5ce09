//! Canonical forms and the decision procedure for equivalence.
//!
//! Normalization runs in three phases. Cleanup removes units and empty
//! groups. Identity contraction eliminates every identity wire that has a
//! partner, innermost first. Canonical labelling then orders the factors of
//! every product and renames bound edges.
//!
//! Canonical labelling treats the expression as a graph whose vertices are
//! generator and identity occurrences and whose links are the bound edges.
//! Each connected component is labelled independently by colour refinement
//! followed by an exhaustive individualization search. The lexicographically
//! least print wins. Components are then ordered by their labelled prints,
//! so identical components never multiply the search.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use crate::expr::{EdgeTerm, Factor, Item, Orientation, TensorExpr};
use crate::names::{BoxName, DirectedEdge, EdgeName};
use crate::wellformed::{violations, Violation};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("expression is not well-formed: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
pub struct IllFormed(pub Vec<Violation>);

fn ensure_wf(g: &TensorExpr) -> Result<(), IllFormed> {
    let v = violations(g);
    if v.is_empty() {
        Ok(())
    } else {
        Err(IllFormed(v))
    }
}

// ---------------------------------------------------------------------------
// Cleanup

fn clean_eterm(t: &EdgeTerm) -> EdgeTerm {
    let mut items = Vec::with_capacity(t.items.len());
    for it in &t.items {
        match it {
            Item::Edge(_) => items.push(it.clone()),
            Item::Group(g) => {
                let body = clean_eterm(&g.body);
                if !body.is_empty() {
                    items.push(Item::Group(crate::expr::Group {
                        orientation: g.orientation,
                        boxname: g.boxname.clone(),
                        body,
                    }));
                }
            }
        }
    }
    EdgeTerm { items }
}

/// Drop `1` factors and empty groups. An empty product becomes `1`.
pub fn cleanup(g: &TensorExpr) -> TensorExpr {
    let mut factors: Vec<Factor> = g
        .factors
        .iter()
        .filter_map(|f| match f {
            Factor::Empty => None,
            Factor::Id { .. } => Some(f.clone()),
            Factor::Gen { name, eterm } => Some(Factor::Gen {
                name: name.clone(),
                eterm: clean_eterm(eterm),
            }),
            Factor::Box { name, body } => Some(Factor::Box {
                name: name.clone(),
                body: cleanup(body),
            }),
        })
        .collect();
    if factors.is_empty() {
        factors.push(Factor::Empty);
    }
    TensorExpr { factors }
}

// ---------------------------------------------------------------------------
// Identity contraction

fn ids_innermost_first(g: &TensorExpr) -> Vec<(Vec<usize>, EdgeName, EdgeName)> {
    let mut ids = Vec::new();
    g.for_each_node(&mut |node, _, path| {
        if let crate::expr::NodeRef::Id { out, inp } = node {
            ids.push((path.to_vec(), out.clone(), inp.clone()));
        }
    });
    // Stable sort: deeper paths first, traversal order among equals.
    ids.sort_by_key(|b| std::cmp::Reverse(b.0.len()));
    ids
}

fn remove_at(g: &mut TensorExpr, path: &[usize]) {
    if path.len() == 1 {
        g.factors.remove(path[0]);
        return;
    }
    if let Factor::Box { body, .. } = &mut g.factors[path[0]] {
        remove_at(body, &path[1..]);
    }
}

fn rename_directed(g: &TensorExpr, from: &DirectedEdge, to: &EdgeName) -> TensorExpr {
    g.map_edges(&mut |e| {
        if e == from {
            DirectedEdge {
                name: to.clone(),
                dir: e.dir,
            }
        } else {
            e.clone()
        }
    })
}

/// One elimination step, if any identity wire is eliminable.
///
/// For `id{+x -y}` the first rule renames the partner `-x` to `-y`; the second
/// renames the partner `+y` to `+x`. In a well-formed expression the partner's
/// node context is always a suffix of the wire's, so the only obstructions are
/// self-loops and wires with no partner at all.
pub fn contract_one(g: &TensorExpr) -> Option<TensorExpr> {
    let present: BTreeSet<DirectedEdge> = g.occurrences().into_iter().map(|o| o.edge).collect();
    for (path, x, y) in ids_innermost_first(g) {
        if x == y {
            continue;
        }
        let mut out = if present.contains(&DirectedEdge::inp(x.clone())) {
            rename_directed(g, &DirectedEdge::inp(x.clone()), &y)
        } else if present.contains(&DirectedEdge::out(y.clone())) {
            rename_directed(g, &DirectedEdge::out(y.clone()), &x)
        } else {
            continue;
        };
        remove_at(&mut out, &path);
        return Some(cleanup(&out));
    }
    None
}

pub fn contract_identities(g: &TensorExpr) -> TensorExpr {
    let mut cur = cleanup(g);
    while let Some(next) = contract_one(&cur) {
        cur = next;
    }
    cur
}

// ---------------------------------------------------------------------------
// Canonical labelling

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum SlotKind {
    Fixed,
    /// Link to another slot, either a bound partner or the other occurrence
    /// of an anonymous free name.
    Link(usize, usize),
    /// Anonymous free name whose only occurrence is this slot.
    Lone,
}

struct Leaf {
    side: usize,
    /// Box path from the root, outermost first.
    path: Vec<BoxName>,
    factor: Factor,
    slots: Vec<(DirectedEdge, SlotKind, bool)>,
}

fn leaf_edges(f: &Factor) -> Vec<DirectedEdge> {
    match f {
        Factor::Id { out, inp } => vec![
            DirectedEdge::out(out.clone()),
            DirectedEdge::inp(inp.clone()),
        ],
        Factor::Gen { eterm, .. } => eterm.edges().into_iter().cloned().collect(),
        _ => vec![],
    }
}

fn collect_leaves(g: &TensorExpr, side: usize, path: &mut Vec<BoxName>, out: &mut Vec<Leaf>) {
    for f in &g.factors {
        match f {
            Factor::Empty => {}
            Factor::Box { name, body } => {
                path.push(name.clone());
                collect_leaves(body, side, path, out);
                path.pop();
            }
            _ => out.push(Leaf {
                side,
                path: path.clone(),
                factor: f.clone(),
                slots: vec![],
            }),
        }
    }
}

/// Write a leaf, naming slot `i` through `name(i, edge)`.
fn write_leaf(out: &mut String, f: &Factor, name: &mut impl FnMut(usize, &DirectedEdge) -> String) {
    fn eterm(
        out: &mut String,
        t: &EdgeTerm,
        idx: &mut usize,
        name: &mut impl FnMut(usize, &DirectedEdge) -> String,
    ) {
        for (k, it) in t.items.iter().enumerate() {
            if k > 0 {
                out.push(' ');
            }
            match it {
                Item::Edge(e) => {
                    out.push(e.dir.sign());
                    out.push_str(&name(*idx, e));
                    *idx += 1;
                }
                Item::Group(g) => {
                    let (open, close) = match g.orientation {
                        Orientation::Clockwise => ('[', '>'),
                        Orientation::Anticlockwise => ('<', ']'),
                    };
                    out.push(open);
                    eterm(out, &g.body, idx, name);
                    out.push(close);
                    out.push_str(g.boxname.as_str());
                }
            }
        }
    }
    match f {
        Factor::Id { out: a, inp: b } => {
            let a = name(0, &DirectedEdge::out(a.clone()));
            let b = name(1, &DirectedEdge::inp(b.clone()));
            let _ = write!(out, "id{{+{a} -{b}}}");
        }
        Factor::Gen { name: n, eterm: t } => {
            out.push_str(n);
            out.push('{');
            eterm(out, t, &mut 0, name);
            out.push('}');
        }
        _ => {}
    }
}

/// Rank signatures so that equal signatures share a rank and order is kept.
fn rank<T: Ord + Clone>(sigs: &[T]) -> Vec<usize> {
    let distinct: BTreeSet<T> = sigs.iter().cloned().collect();
    let index: BTreeMap<T, usize> = distinct
        .into_iter()
        .enumerate()
        .map(|(i, s)| (s, i))
        .collect();
    sigs.iter().map(|s| index[s]).collect()
}

struct Labeller<'a> {
    leaves: &'a [Leaf],
    members: Vec<usize>,
    local: BTreeMap<usize, usize>,
}

impl Labeller<'_> {
    fn refine(&self, mut colour: Vec<usize>) -> Vec<usize> {
        loop {
            let classes = colour.iter().collect::<BTreeSet<_>>().len();
            let sigs: Vec<(usize, Vec<(u8, usize, usize)>)> = self
                .members
                .iter()
                .enumerate()
                .map(|(i, &l)| {
                    let slots = self.leaves[l]
                        .slots
                        .iter()
                        .map(|(_, kind, _)| match kind {
                            SlotKind::Fixed => (0, 0, 0),
                            SlotKind::Lone => (1, 0, 0),
                            SlotKind::Link(pl, ps) => (2, colour[self.local[pl]], *ps),
                        })
                        .collect();
                    (colour[i], slots)
                })
                .collect();
            let next = rank(&sigs);
            let n = next.iter().collect::<BTreeSet<_>>().len();
            colour = next;
            if n == classes {
                return colour;
            }
        }
    }

    /// Print the component with leaves in colour order and local numbering.
    fn print(&self, colour: &[usize]) -> (String, Vec<usize>) {
        let mut order: Vec<usize> = (0..self.members.len()).collect();
        order.sort_by_key(|&i| colour[i]);
        let mut names: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let mut s = String::new();
        for &i in &order {
            let l = self.members[i];
            let leaf = &self.leaves[l];
            let _ = write!(s, "{}|", container_key(leaf));
            let mut counter = names.len();
            write_leaf(&mut s, &leaf.factor, &mut |k, e| {
                let (_, kind, bound) = &leaf.slots[k];
                match kind {
                    SlotKind::Fixed => e.name.to_string(),
                    SlotKind::Lone => {
                        let key = (l, k);
                        let id = *names.entry(key).or_insert_with(|| {
                            counter += 1;
                            counter
                        });
                        format!("?{id}")
                    }
                    SlotKind::Link(pl, ps) => {
                        let key = if (l, k) < (*pl, *ps) {
                            (l, k)
                        } else {
                            (*pl, *ps)
                        };
                        let id = *names.entry(key).or_insert_with(|| {
                            counter += 1;
                            counter
                        });
                        format!("{}{id}", if *bound { '_' } else { '?' })
                    }
                }
            });
            s.push('\n');
        }
        (s, order.iter().map(|&i| self.members[i]).collect())
    }

    fn search(&self, colour: Vec<usize>, best: &mut Option<(String, Vec<usize>)>) {
        let colour = self.refine(colour);
        let mut cells: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (i, &c) in colour.iter().enumerate() {
            cells.entry(c).or_default().push(i);
        }
        match cells.values().find(|cell| cell.len() > 1) {
            None => {
                let cand = self.print(&colour);
                if best.as_ref().is_none_or(|b| cand.0 < b.0) {
                    *best = Some(cand);
                }
            }
            Some(cell) => {
                for &v in cell {
                    let split: Vec<(usize, bool)> = colour
                        .iter()
                        .enumerate()
                        .map(|(i, &c)| (c, !(i == v)))
                        .collect();
                    self.search(rank(&split), best);
                }
            }
        }
    }
}

fn container_key(leaf: &Leaf) -> String {
    let mut s = leaf.side.to_string();
    for b in &leaf.path {
        s.push('/');
        s.push_str(b.as_str());
    }
    s
}

/// Canonical forms of several expressions sharing one anonymous-name space.
///
/// Bound names of each side are renamed `b1, b2, ..`. Free names outside
/// `fixed` are treated as anonymous. Occurrences of the same anonymous name on
/// different sides stay linked and are renamed `f1, f2, ..` consistently.
/// All inputs must already be contracted and cleaned.
fn label(sides: &[TensorExpr], fixed: Option<&BTreeSet<EdgeName>>) -> Vec<TensorExpr> {
    let mut leaves = Vec::new();
    for (i, g) in sides.iter().enumerate() {
        collect_leaves(g, i, &mut Vec::new(), &mut leaves);
    }
    // Resolve slot kinds.
    let mut by_side_edge: BTreeMap<(usize, DirectedEdge), (usize, usize)> = BTreeMap::new();
    for (l, leaf) in leaves.iter().enumerate() {
        for (k, e) in leaf_edges(&leaf.factor).into_iter().enumerate() {
            by_side_edge.insert((leaf.side, e), (l, k));
        }
    }
    let mut anon_occ: BTreeMap<EdgeName, Vec<(usize, usize)>> = BTreeMap::new();
    for l in 0..leaves.len() {
        let side = leaves[l].side;
        let edges = leaf_edges(&leaves[l].factor);
        let mut slots = Vec::with_capacity(edges.len());
        for (k, e) in edges.into_iter().enumerate() {
            let kind = match by_side_edge.get(&(side, e.partner())) {
                Some(&(pl, ps)) => SlotKind::Link(pl, ps),
                None if fixed.is_some_and(|f| !f.contains(&e.name)) => {
                    anon_occ.entry(e.name.clone()).or_default().push((l, k));
                    SlotKind::Lone
                }
                None => SlotKind::Fixed,
            };
            let bound = matches!(kind, SlotKind::Link(..));
            slots.push((e, kind, bound));
        }
        leaves[l].slots = slots;
    }
    for occ in anon_occ.values() {
        if let [a, b] = occ.as_slice() {
            leaves[a.0].slots[a.1].1 = SlotKind::Link(b.0, b.1);
            leaves[b.0].slots[b.1].1 = SlotKind::Link(a.0, a.1);
        }
    }
    let fixed_names: BTreeSet<EdgeName> = leaves
        .iter()
        .flat_map(|l| {
            l.slots
                .iter()
                .filter(|s| s.1 == SlotKind::Fixed)
                .map(|s| s.0.name.clone())
        })
        .collect();

    // Connected components.
    let mut comp = vec![usize::MAX; leaves.len()];
    let mut components: Vec<Vec<usize>> = Vec::new();
    for start in 0..leaves.len() {
        if comp[start] != usize::MAX {
            continue;
        }
        let id = components.len();
        let mut stack = vec![start];
        let mut members = Vec::new();
        comp[start] = id;
        while let Some(l) = stack.pop() {
            members.push(l);
            for (_, kind, _) in &leaves[l].slots {
                if let SlotKind::Link(pl, _) = kind {
                    if comp[*pl] == usize::MAX {
                        comp[*pl] = id;
                        stack.push(*pl);
                    }
                }
            }
        }
        members.sort();
        components.push(members);
    }

    let mut labelled: Vec<(String, Vec<usize>)> = components
        .into_iter()
        .map(|members| {
            let local = members.iter().enumerate().map(|(i, &l)| (l, i)).collect();
            let lab = Labeller {
                leaves: &leaves,
                members,
                local,
            };
            let init: Vec<(String, String)> = lab
                .members
                .iter()
                .map(|&l| {
                    let leaf = &leaves[l];
                    let mut s = String::new();
                    write_leaf(&mut s, &leaf.factor, &mut |k, e| match leaf.slots[k].1 {
                        SlotKind::Fixed => e.name.to_string(),
                        SlotKind::Lone => "?".to_string(),
                        SlotKind::Link(..) => if leaf.slots[k].2 { "_" } else { "?" }.to_string(),
                    });
                    (container_key(leaf), s)
                })
                .collect();
            let mut best = None;
            lab.search(rank(&init), &mut best);
            best.expect("search visits at least one leaf")
        })
        .collect();
    labelled.sort();

    let mut global_rank = vec![0usize; leaves.len()];
    let mut next = 0;
    for (_, order) in &labelled {
        for &l in order {
            global_rank[l] = next;
            next += 1;
        }
    }

    // Emit each side with leaves in rank order, then boxes by name.
    let mut bound_names: BTreeMap<(usize, usize), EdgeName> = BTreeMap::new();
    let mut bound_counter = 0;
    let mut anon_counter = 0;
    let fresh = |prefix: &str, counter: &mut usize| loop {
        *counter += 1;
        let n = EdgeName::new(format!("{prefix}{counter}")).expect("canonical names are valid");
        if !fixed_names.contains(&n) {
            return n;
        }
    };
    let mut out = Vec::new();
    for (side, g) in sides.iter().enumerate() {
        let side_leaves: Vec<usize> = (0..leaves.len())
            .filter(|&l| leaves[l].side == side)
            .collect();
        let rebuilt = emit(
            g,
            &mut Vec::new(),
            &side_leaves,
            &leaves,
            &global_rank,
            &mut |l, k| {
                let (e, kind, bound) = &leaves[l].slots[k];
                match kind {
                    SlotKind::Fixed => e.name.clone(),
                    SlotKind::Lone => fresh("f", &mut anon_counter),
                    SlotKind::Link(pl, ps) => {
                        let key = if (l, k) < (*pl, *ps) {
                            (l, k)
                        } else {
                            (*pl, *ps)
                        };
                        if let Some(n) = bound_names.get(&key) {
                            return n.clone();
                        }
                        let n = if *bound {
                            fresh("b", &mut bound_counter)
                        } else {
                            fresh("f", &mut anon_counter)
                        };
                        bound_names.insert(key, n.clone());
                        n
                    }
                }
            },
        );
        out.push(rebuilt);
    }
    out
}

fn emit(
    g: &TensorExpr,
    path: &mut Vec<BoxName>,
    side_leaves: &[usize],
    leaves: &[Leaf],
    rank: &[usize],
    name: &mut impl FnMut(usize, usize) -> EdgeName,
) -> TensorExpr {
    let mut here: Vec<usize> = side_leaves
        .iter()
        .copied()
        .filter(|&l| leaves[l].path == *path)
        .collect();
    here.sort_by_key(|&l| rank[l]);
    let mut factors = Vec::new();
    for l in here {
        let mut k = 0;
        let f = match &leaves[l].factor {
            Factor::Id { .. } => Factor::Id {
                out: name(l, 0),
                inp: name(l, 1),
            },
            Factor::Gen { name: n, eterm } => Factor::Gen {
                name: n.clone(),
                eterm: eterm.map_edges(&mut |e| {
                    let r = DirectedEdge {
                        name: name(l, k),
                        dir: e.dir,
                    };
                    k += 1;
                    r
                }),
            },
            other => other.clone(),
        };
        factors.push(f);
    }
    let mut boxes: Vec<(&BoxName, &TensorExpr)> = g
        .factors
        .iter()
        .filter_map(|f| match f {
            Factor::Box { name, body } => Some((name, body)),
            _ => None,
        })
        .collect();
    boxes.sort_by(|a, b| a.0.cmp(b.0));
    for (b, body) in boxes {
        path.push(b.clone());
        let inner = emit(body, path, side_leaves, leaves, rank, name);
        path.pop();
        factors.push(Factor::Box {
            name: b.clone(),
            body: inner,
        });
    }
    if factors.is_empty() {
        factors.push(Factor::Empty);
    }
    TensorExpr { factors }
}

// ---------------------------------------------------------------------------
// Public entry points

/// The canonical representative of the equivalence class of `g`.
pub fn normalize(g: &TensorExpr) -> Result<TensorExpr, IllFormed> {
    ensure_wf(g)?;
    Ok(normalize_unchecked(g))
}

/// Normalize without checking well-formedness. Intended for callers that have
/// already established it.
pub fn normalize_unchecked(g: &TensorExpr) -> TensorExpr {
    let c = contract_identities(g);
    label(std::slice::from_ref(&c), None)
        .pop()
        .expect("one side in, one side out")
}

/// Canonical form in which free names outside `fixed` are also renamed.
pub fn normalize_anon(g: &TensorExpr, fixed: &BTreeSet<EdgeName>) -> TensorExpr {
    let c = contract_identities(g);
    label(std::slice::from_ref(&c), Some(fixed))
        .pop()
        .expect("one side in, one side out")
}

/// Joint canonical form of an equation's sides. Free names outside `fixed`
/// are renamed consistently across both sides.
pub fn normalize_pair(
    lhs: &TensorExpr,
    rhs: &TensorExpr,
    fixed: &BTreeSet<EdgeName>,
) -> (TensorExpr, TensorExpr) {
    let sides = [contract_identities(lhs), contract_identities(rhs)];
    let mut out = label(&sides, Some(fixed));
    let r = out.pop().expect("two sides");
    let l = out.pop().expect("two sides");
    (l, r)
}

pub fn equiv(g: &TensorExpr, h: &TensorExpr) -> Result<bool, IllFormed> {
    Ok(normalize(g)? == normalize(h)?)
}

/// Structural key for use in sets once both values are canonical.
pub fn canonical_text(g: &TensorExpr) -> String {
    crate::syntax::print_tensor(&normalize_unchecked(g))
}

use std::borrow::Cow;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use super::semiring::Semiring;
use crate::expr::{Factor, Item, TensorExpr};
use crate::names::{DirectedEdge, Direction, EdgeName};

/// Default absolute tolerance for float comparisons.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("expression is not concrete: it still contains !-boxes")]
    NotConcrete,
    #[error("no array for generator {generator} at arity {word}")]
    MissingAssignment { generator: String, word: String },
    #[error("array for {generator} at arity {word} has {found} entries, expected {expected}")]
    ArityMismatch {
        generator: String,
        word: String,
        expected: usize,
        found: usize,
    },
    #[error("invalid arity word {0:?}: use ^ for outputs and v for inputs")]
    BadWord(String),
    #[error("dimension must be at least 1")]
    ZeroDimension,
}

/// Arrays for every arity of one generator, computed on demand.
pub type Family<S> = Arc<dyn Fn(&str) -> Option<Vec<S>> + Send + Sync>;

/// An interpretation of generators as dense arrays with every axis of size
/// `dim`. Arrays are row-major with axes in edgeterm order.
#[derive(Clone)]
pub struct Model<S> {
    dim: usize,
    tolerance: f64,
    arrays: BTreeMap<(String, String), Vec<S>>,
    families: BTreeMap<String, Family<S>>,
}

impl<S: Semiring> fmt::Debug for Model<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Model")
            .field("semiring", &S::NAME)
            .field("dim", &self.dim)
            .field("arrays", &self.arrays.keys().collect::<Vec<_>>())
            .field("families", &self.families.keys().collect::<Vec<_>>())
            .finish()
    }
}

/// The arity word of a concrete edgeterm.
pub fn word_of(items: &[Item]) -> Option<String> {
    items
        .iter()
        .map(|it| match it {
            Item::Edge(e) => Some(match e.dir {
                Direction::Out => '^',
                Direction::In => 'v',
            }),
            Item::Group(_) => None,
        })
        .collect()
}

impl<S: Semiring> Model<S> {
    pub fn new(dim: usize) -> Result<Self, ModelError> {
        if dim == 0 {
            return Err(ModelError::ZeroDimension);
        }
        Ok(Self {
            dim,
            tolerance: DEFAULT_TOLERANCE,
            arrays: BTreeMap::new(),
            families: BTreeMap::new(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tolerance = tol;
        self
    }

    /// Assign a dense array to one arity of a generator. Explicit arrays take
    /// precedence over a family for the same generator.
    pub fn assign(&mut self, generator: &str, word: &str, data: Vec<S>) -> Result<(), ModelError> {
        if !word.chars().all(|c| c == '^' || c == 'v') {
            return Err(ModelError::BadWord(word.to_string()));
        }
        let expected = self.dim.pow(word.len() as u32);
        if data.len() != expected {
            return Err(ModelError::ArityMismatch {
                generator: generator.to_string(),
                word: word.to_string(),
                expected,
                found: data.len(),
            });
        }
        self.arrays
            .insert((generator.to_string(), word.to_string()), data);
        Ok(())
    }

    pub fn assign_family(&mut self, generator: &str, family: Family<S>) {
        self.families.insert(generator.to_string(), family);
    }

    pub fn array(&self, generator: &str, word: &str) -> Result<Cow<'_, [S]>, ModelError> {
        let missing = || ModelError::MissingAssignment {
            generator: generator.to_string(),
            word: word.to_string(),
        };
        if let Some(a) = self.arrays.get(&(generator.to_string(), word.to_string())) {
            return Ok(Cow::Borrowed(a));
        }
        let data = self
            .families
            .get(generator)
            .and_then(|f| f(word))
            .ok_or_else(missing)?;
        let expected = self.dim.pow(word.len() as u32);
        if data.len() != expected {
            return Err(ModelError::ArityMismatch {
                generator: generator.to_string(),
                word: word.to_string(),
                expected,
                found: data.len(),
            });
        }
        Ok(Cow::Owned(data))
    }
}

/// The value of a concrete expression: an array whose axes are the free
/// directed edges in lexicographic order of edge name.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorValue<S> {
    pub axes: Vec<DirectedEdge>,
    pub dim: usize,
    pub data: Vec<S>,
}

impl<S: Semiring> TensorValue<S> {
    /// Entry at one index per axis.
    pub fn get(&self, index: &[usize]) -> &S {
        &self.data[flat(index, self.dim)]
    }

    /// Whether both values have the same axes and entrywise close data.
    pub fn close_to(&self, other: &Self, tol: f64) -> bool {
        self.axes == other.axes
            && self
                .data
                .iter()
                .zip(&other.data)
                .all(|(a, b)| a.close_to(b, tol))
    }

    /// First index at which the two values differ by more than `tol`.
    pub fn first_difference(&self, other: &Self, tol: f64) -> Option<(Vec<usize>, S, S)> {
        let pos = self
            .data
            .iter()
            .zip(&other.data)
            .position(|(a, b)| !a.close_to(b, tol))?;
        Some((
            unflat(pos, self.dim, self.axes.len()),
            self.data[pos].clone(),
            other.data[pos].clone(),
        ))
    }
}

fn flat(index: &[usize], dim: usize) -> usize {
    index.iter().fold(0, |acc, &i| acc * dim + i)
}

fn unflat(mut pos: usize, dim: usize, rank: usize) -> Vec<usize> {
    let mut out = vec![0; rank];
    for slot in out.iter_mut().rev() {
        *slot = pos % dim;
        pos /= dim;
    }
    out
}

/// A dense array with one (possibly repeated) edge label per axis.
#[derive(Clone, Debug)]
struct Labeled<S> {
    axes: Vec<DirectedEdge>,
    data: Vec<S>,
}

fn factors<S: Semiring>(g: &TensorExpr, m: &Model<S>) -> Result<Vec<Labeled<S>>, ModelError> {
    let d = m.dim;
    let mut out = Vec::new();
    for f in &g.factors {
        match f {
            Factor::Empty => {}
            Factor::Box { .. } => return Err(ModelError::NotConcrete),
            Factor::Id { out: o, inp } => {
                let mut data = vec![S::zero(); d * d];
                for i in 0..d {
                    data[i * d + i] = S::one();
                }
                out.push(Labeled {
                    axes: vec![DirectedEdge::out(o.clone()), DirectedEdge::inp(inp.clone())],
                    data,
                });
            }
            Factor::Gen { name, eterm } => {
                let word = word_of(&eterm.items).ok_or(ModelError::NotConcrete)?;
                let data = m.array(name, &word)?.into_owned();
                out.push(Labeled {
                    axes: eterm.edges().into_iter().cloned().collect(),
                    data,
                });
            }
        }
    }
    Ok(out)
}

/// Free axes of a product of labeled arrays, sorted by name.
fn free_axes<S>(parts: &[&Labeled<S>]) -> Vec<DirectedEdge> {
    let mut count: BTreeMap<&EdgeName, (usize, &DirectedEdge)> = BTreeMap::new();
    for p in parts {
        for a in &p.axes {
            count.entry(&a.name).or_insert((0, a)).0 += 1;
        }
    }
    count
        .into_values()
        .filter(|(n, _)| *n == 1)
        .map(|(_, a)| a.clone())
        .collect()
}

/// Contract the given arrays over every name that occurs twice, looping over
/// all values of the distinct names involved.
fn contract<S: Semiring>(parts: &[&Labeled<S>], dim: usize) -> Labeled<S> {
    let free = free_axes(parts);
    let mut vars: Vec<&EdgeName> = free.iter().map(|a| &a.name).collect();
    for p in parts {
        for a in &p.axes {
            if !vars.contains(&&a.name) {
                vars.push(&a.name);
            }
        }
    }
    let slot = |n: &EdgeName| {
        vars.iter()
            .position(|v| *v == n)
            .expect("every axis has a variable")
    };
    let maps: Vec<Vec<usize>> = parts
        .iter()
        .map(|p| p.axes.iter().map(|a| slot(&a.name)).collect())
        .collect();
    let nfree = free.len();
    let mut data = vec![S::zero(); dim.pow(nfree as u32)];
    let mut idx = vec![0usize; vars.len()];
    'outer: loop {
        let mut term = S::one();
        for (p, map) in parts.iter().zip(&maps) {
            let pos = map.iter().fold(0, |acc, &v| acc * dim + idx[v]);
            term = term * p.data[pos].clone();
            if term.is_zero() {
                break;
            }
        }
        if !term.is_zero() {
            let cell = flat(&idx[..nfree], dim);
            data[cell] = data[cell].clone() + term;
        }
        for k in (0..idx.len()).rev() {
            idx[k] += 1;
            if idx[k] < dim {
                continue 'outer;
            }
            idx[k] = 0;
        }
        break;
    }
    Labeled { axes: free, data }
}

/// Evaluate a concrete expression by contracting its factors pairwise,
/// always next taking the factor that shares the most names with the result
/// so far.
pub fn evaluate<S: Semiring>(g: &TensorExpr, m: &Model<S>) -> Result<TensorValue<S>, ModelError> {
    let mut pending = factors(g, m)?;
    let mut acc = Labeled {
        axes: Vec::new(),
        data: vec![S::one()],
    };
    while !pending.is_empty() {
        let shared = |f: &Labeled<S>| {
            f.axes
                .iter()
                .filter(|a| acc.axes.iter().any(|b| b.name == a.name))
                .count()
        };
        let best = (0..pending.len())
            .max_by_key(|&i| (shared(&pending[i]), std::cmp::Reverse(i)))
            .expect("non-empty");
        let next = pending.remove(best);
        acc = contract(&[&acc, &next], m.dim);
    }
    Ok(TensorValue {
        axes: acc.axes,
        dim: m.dim,
        data: acc.data,
    })
}

/// Reference evaluation: one loop over every assignment of every name.
pub fn evaluate_brute_force<S: Semiring>(
    g: &TensorExpr,
    m: &Model<S>,
) -> Result<TensorValue<S>, ModelError> {
    let parts = factors(g, m)?;
    let refs: Vec<&Labeled<S>> = parts.iter().collect();
    let out = contract(&refs, m.dim);
    Ok(TensorValue {
        axes: out.axes,
        dim: m.dim,
        data: out.data,
    })
}

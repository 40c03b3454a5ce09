//! Signatures with arity patterns, and theories of named axioms.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use regex::Regex;

use super::equation::{validate, Equation, EquationError};
use crate::expr::{EdgeTerm, Item, NodeRef, TensorExpr};
use crate::names::Direction;

/// Expansions of each group tried when checking an occurrence against its
/// declared arity.
const ARITY_DEPTH: usize = 2;

/// An arity word over `^` (output) and `v` (input), optionally with
/// parenthesised segments marked `*` that may repeat any number of times.
#[derive(Clone, Debug)]
pub struct Arity {
    text: String,
    re: Regex,
}

impl PartialEq for Arity {
    fn eq(&self, other: &Self) -> bool {
        self.text == other.text
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("bad arity pattern {text:?}: {reason}")]
pub struct BadArity {
    pub text: String,
    pub reason: String,
}

impl Arity {
    pub fn parse(text: &str) -> Result<Self, BadArity> {
        let bad = |reason: &str| BadArity {
            text: text.to_string(),
            reason: reason.to_string(),
        };
        let mut re = String::from("^");
        let mut depth = 0usize;
        let mut prev_close = false;
        for c in text.chars() {
            let close = c == ')';
            match c {
                '^' => re.push_str(r"\^"),
                'v' => re.push('v'),
                '(' => {
                    depth += 1;
                    re.push_str("(?:");
                }
                ')' => {
                    depth = depth.checked_sub(1).ok_or_else(|| bad("unbalanced ')'"))?;
                    re.push(')');
                }
                '*' if prev_close => re.push('*'),
                '*' => return Err(bad("'*' must follow a parenthesised segment")),
                c if c.is_whitespace() => continue,
                _ => return Err(bad("expected one of ^ v ( ) *")),
            }
            prev_close = close;
        }
        if depth != 0 {
            return Err(bad("unbalanced '('"));
        }
        re.push('$');
        Ok(Self {
            text: text.chars().filter(|c| !c.is_whitespace()).collect(),
            re: Regex::new(&re).expect("translated pattern is a valid regex"),
        })
    }

    pub fn matches(&self, word: &str) -> bool {
        self.re.is_match(word)
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }
}

impl fmt::Display for Arity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

/// Arity words of the concrete instances of an edgeterm, expanding every
/// group between zero and `depth` times.
pub fn arity_words(t: &EdgeTerm, depth: usize) -> BTreeSet<String> {
    let mut acc = BTreeSet::from([String::new()]);
    for it in &t.items {
        let parts: BTreeSet<String> = match it {
            Item::Edge(e) => BTreeSet::from([match e.dir {
                Direction::Out => "^".to_string(),
                Direction::In => "v".to_string(),
            }]),
            Item::Group(g) => {
                let body = arity_words(&g.body, depth);
                let mut reps = BTreeSet::from([String::new()]);
                let mut all = reps.clone();
                for _ in 0..depth {
                    reps = reps
                        .iter()
                        .flat_map(|p| body.iter().map(move |b| format!("{p}{b}")))
                        .collect();
                    all.extend(reps.iter().cloned());
                }
                all
            }
        };
        acc = acc
            .iter()
            .flat_map(|a| parts.iter().map(move |p| format!("{a}{p}")))
            .collect();
    }
    acc
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum ArityError {
    #[error("generator {0} is not declared")]
    Undeclared(String),
    #[error("occurrence {occurrence} of {name} has an instance of arity {word}, which does not match {declared}")]
    Mismatch {
        name: String,
        occurrence: String,
        word: String,
        declared: String,
    },
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum TheoryError {
    #[error("generator {0} is declared twice")]
    DuplicateGenerator(String),
    #[error("axiom {0} is declared twice")]
    DuplicateAxiom(String),
    #[error("axiom {name}: {source}")]
    InvalidAxiom { name: String, source: EquationError },
    #[error("axiom {name}: {source}")]
    Arity { name: String, source: ArityError },
}

/// A signature of generators and a list of named axioms.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Theory {
    pub generators: BTreeMap<String, Arity>,
    pub axioms: Vec<Equation>,
}

impl Theory {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn declare(&mut self, name: impl Into<String>, arity: Arity) -> Result<(), TheoryError> {
        let name = name.into();
        if self.generators.contains_key(&name) {
            return Err(TheoryError::DuplicateGenerator(name));
        }
        self.generators.insert(name, arity);
        Ok(())
    }

    /// Add a named axiom after checking it against the signature.
    pub fn add_axiom(&mut self, eq: Equation) -> Result<(), TheoryError> {
        let name = eq.name.clone().unwrap_or_default();
        if self.axiom(&name).is_some() {
            return Err(TheoryError::DuplicateAxiom(name));
        }
        validate(&eq).map_err(|source| TheoryError::InvalidAxiom {
            name: name.clone(),
            source,
        })?;
        self.check_equation(&eq)
            .map_err(|source| TheoryError::Arity { name, source })?;
        self.axioms.push(eq);
        Ok(())
    }

    pub fn axiom(&self, name: &str) -> Option<&Equation> {
        self.axioms.iter().find(|a| a.name.as_deref() == Some(name))
    }

    pub fn check_arities(&self, g: &TensorExpr) -> Result<(), ArityError> {
        let mut err = None;
        g.for_each_node(&mut |node, _, _| {
            let NodeRef::Gen { name, eterm } = node else {
                return;
            };
            if err.is_some() {
                return;
            }
            let Some(arity) = self.generators.get(name) else {
                err = Some(ArityError::Undeclared(name.to_string()));
                return;
            };
            if let Some(word) = arity_words(eterm, ARITY_DEPTH)
                .into_iter()
                .find(|w| !arity.matches(w))
            {
                err = Some(ArityError::Mismatch {
                    name: name.to_string(),
                    occurrence: format!("{name}{{{eterm}}}"),
                    word,
                    declared: arity.to_string(),
                });
            }
        });
        err.map_or(Ok(()), Err)
    }

    pub fn check_equation(&self, eq: &Equation) -> Result<(), ArityError> {
        self.check_arities(&eq.lhs)?;
        self.check_arities(&eq.rhs)
    }
}

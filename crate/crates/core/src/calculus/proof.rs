//! Proof scripts: theorems, justified steps and induction blocks.

use std::fmt;

use super::equation::Equation;
use crate::boxops::BoxOp;
use crate::expr::TensorExpr;
use crate::names::{BoxName, EdgeName};

/// One specialization applied to an axiom, lemma, step or hypothesis.
#[derive(Clone, Debug, PartialEq)]
pub enum SpecOp {
    RenameEdge(EdgeName, EdgeName),
    RenameBox(BoxName, BoxName),
    Op(BoxOp),
    Weaken(BoxName, TensorExpr),
}

impl fmt::Display for SpecOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpecOp::RenameEdge(a, b) => write!(f, "rename {a}->{b}"),
            SpecOp::RenameBox(a, b) => write!(f, "boxrename {a}->{b}"),
            SpecOp::Op(op) => write!(f, "{op}"),
            SpecOp::Weaken(a, k) => write!(f, "weaken {a} {k}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Justification {
    /// The two sides are equivalent, or (with a reference) the claim
    /// restates an earlier step, axiom or lemma up to equivalence.
    Equiv(Option<String>),
    Axiom {
        name: String,
        spec: Vec<SpecOp>,
    },
    From {
        step: String,
        spec: Vec<SpecOp>,
    },
    Prod {
        step: String,
        with: TensorExpr,
    },
    Box {
        step: String,
        boxname: BoxName,
    },
    Sym(String),
    Trans(Vec<String>),
    Hyp {
        name: String,
        spec: Vec<SpecOp>,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Step {
    pub id: String,
    pub claimed: Equation,
    pub just: Justification,
    pub line: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Induction {
    /// Identifier of the proved equation. Naming the enclosing theorem
    /// proves its statement.
    pub id: String,
    /// Explicit goal; defaults to the enclosing theorem's statement.
    pub goal: Option<Equation>,
    pub boxname: BoxName,
    pub base: Vec<ProofItem>,
    pub step: Vec<ProofItem>,
    /// Boxes listed after `fixing` on the step case, if any.
    pub fixing: Option<Vec<BoxName>>,
    pub line: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ProofItem {
    Step(Step),
    Induction(Induction),
}

impl ProofItem {
    pub fn id(&self) -> &str {
        match self {
            ProofItem::Step(s) => &s.id,
            ProofItem::Induction(i) => &i.id,
        }
    }

    pub fn line(&self) -> usize {
        match self {
            ProofItem::Step(s) => s.line,
            ProofItem::Induction(i) => i.line,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Theorem {
    pub name: String,
    pub statement: Equation,
    pub proof: Vec<ProofItem>,
    pub line: usize,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ProofScript {
    pub theorems: Vec<Theorem>,
}

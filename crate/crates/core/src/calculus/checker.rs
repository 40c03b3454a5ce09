//! Checking proof scripts against a theory.
//!
//! Every step carries its own justification, so checking a step means
//! recomputing the conclusion of the named rule and comparing it side by side
//! with the claimed equation up to equivalence. Induction blocks check that
//! the base case concludes `Kill_B(goal)` and the step case concludes
//! `Exp_B(goal)` while `B` is fixed and the goal is available as a hypothesis.
//!
//! Fixing is enforced by box name. To stop a fixed box escaping the check
//! through a rename, each derived equation carries the set of names that
//! descend from fixed boxes, and operations on those names are refused too.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::equation::{
    apply_op_eq, box_intro, prod, rename_box_eq, rename_edge_eq, validate, weaken_eq, Equation,
    EquationError, Mismatch,
};
use super::proof::{Induction, Justification, ProofItem, ProofScript, SpecOp, Step, Theorem};
use super::theory::{ArityError, Theory};
use crate::boxops::{BoxOp, OpError, OpKind};
use crate::names::BoxName;
use crate::normalize::equiv;

/// Name under which the innermost induction hypothesis is also available.
pub const IH: &str = "ih";

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum RuleError {
    #[error("unknown step {0}")]
    UnknownStep(String),
    #[error("unknown axiom or lemma {0}")]
    UnknownAxiom(String),
    #[error("no induction hypothesis {0} is in scope")]
    UnknownHypothesis(String),
    #[error("identifier {0} is already used")]
    DuplicateId(String),
    #[error("operation {op} targets the fixed !-box {}", .op.target)]
    FixedBoxViolation { op: BoxOp },
    #[error("induction hypotheses may not rename !-boxes: {0}")]
    HypothesisSpecialization(String),
    #[error("claimed equation is invalid: {0}")]
    InvalidClaim(EquationError),
    #[error(transparent)]
    Arity(#[from] ArityError),
    #[error("result is not well-formed: {0}")]
    IllFormedResult(String),
    #[error("incompatible boundaries: {0}")]
    Incompatible(Mismatch),
    #[error(transparent)]
    Op(OpError),
    #[error("{side} side does not match: derived {derived}, claimed {claimed}")]
    ClaimMismatch {
        side: &'static str,
        derived: String,
        claimed: String,
    },
    #[error("sides are not equivalent: {lhs} vs {rhs}")]
    NotEquivalent { lhs: String, rhs: String },
    #[error("transitivity gap between {left} and {right}")]
    TransGap { left: String, right: String },
    #[error("transitivity needs at least two steps")]
    ShortTrans,
    #[error("!-box {0} is not a top-level !-box of the goal")]
    NotTopLevel(BoxName),
    #[error("fixing annotation names [{}] but the induction box is {expected}", .listed.iter().map(|b| b.to_string()).collect::<Vec<_>>().join(", "))]
    BadFixing {
        listed: Vec<BoxName>,
        expected: BoxName,
    },
    #[error("induction {0} names no goal; give one with ': G = H'")]
    MissingGoal(String),
    #[error("{0} case is empty")]
    EmptyCase(&'static str),
    #[error("{case} case concludes {found} but must conclude {expected}")]
    CaseMismatch {
        case: &'static str,
        found: String,
        expected: String,
    },
    #[error("proof is empty")]
    EmptyProof,
    #[error("proof concludes {found} but the statement is {expected}")]
    TheoremMismatch { found: String, expected: String },
}

impl From<EquationError> for RuleError {
    fn from(e: EquationError) -> Self {
        match e {
            EquationError::IllFormed { .. } => RuleError::IllFormedResult(e.to_string()),
            EquationError::Incompatible(m) => RuleError::Incompatible(m),
            EquationError::Op(OpError::IllFormedResult(v)) => RuleError::IllFormedResult(
                v.iter()
                    .map(|x| x.to_string())
                    .collect::<Vec<_>>()
                    .join("; "),
            ),
            EquationError::Op(e) => RuleError::Op(e),
        }
    }
}

/// Outcome of one step or induction block.
#[derive(Clone, Debug, PartialEq)]
pub struct ItemReport {
    pub id: String,
    pub kind: &'static str,
    pub line: usize,
    pub depth: usize,
    pub error: Option<RuleError>,
}

impl fmt::Display for ItemReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let indent = "  ".repeat(self.depth + 1);
        match &self.error {
            None => write!(f, "{indent}{} {}: ok", self.kind, self.id),
            Some(e) => write!(
                f,
                "{indent}{} {} (line {}): {e}",
                self.kind, self.id, self.line
            ),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TheoremReport {
    pub name: String,
    pub items: Vec<ItemReport>,
    /// Problems with the statement itself or with the final conclusion.
    pub error: Option<RuleError>,
}

impl TheoremReport {
    pub fn accepted(&self) -> bool {
        self.error.is_none() && self.items.iter().all(|i| i.error.is_none())
    }

    pub fn errors(&self) -> impl Iterator<Item = &ItemReport> {
        self.items.iter().filter(|i| i.error.is_some())
    }
}

impl fmt::Display for TheoremReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for item in &self.items {
            writeln!(f, "{item}")?;
        }
        match &self.error {
            Some(e) => write!(f, "theorem {}: rejected: {e}", self.name),
            None if self.accepted() => write!(f, "theorem {}: accepted", self.name),
            None => write!(f, "theorem {}: rejected", self.name),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Verdict {
    pub theorems: Vec<TheoremReport>,
}

impl Verdict {
    pub fn accepted(&self) -> bool {
        self.theorems.iter().all(TheoremReport::accepted)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for t in &self.theorems {
            writeln!(f, "{t}")?;
        }
        Ok(())
    }
}

/// A derived equation together with the box names descending from fixed
/// boxes through renaming.
#[derive(Clone, Debug)]
struct Known {
    eq: Equation,
    guard: BTreeSet<BoxName>,
}

#[derive(Clone, Debug, Default)]
struct Scope {
    steps: BTreeMap<String, Known>,
    hyps: BTreeMap<String, Equation>,
    fixed: BTreeSet<BoxName>,
    theorem: Option<(String, Equation)>,
}

/// Checks scripts against a theory, accumulating accepted theorems as
/// lemmas for later use.
pub struct Checker<'t> {
    theory: &'t Theory,
    lemmas: Vec<Equation>,
}

pub fn check_proof(script: &ProofScript, theory: &Theory) -> Verdict {
    Checker::new(theory).check_script(script)
}

fn mismatch(derived: &Equation, claimed: &Equation) -> Result<(), RuleError> {
    for (side, d, c) in [
        ("left", &derived.lhs, &claimed.lhs),
        ("right", &derived.rhs, &claimed.rhs),
    ] {
        if !matches!(equiv(d, c), Ok(true)) {
            return Err(RuleError::ClaimMismatch {
                side,
                derived: d.to_string(),
                claimed: c.to_string(),
            });
        }
    }
    Ok(())
}

impl<'t> Checker<'t> {
    pub fn new(theory: &'t Theory) -> Self {
        Self {
            theory,
            lemmas: Vec::new(),
        }
    }

    pub fn lemmas(&self) -> &[Equation] {
        &self.lemmas
    }

    pub fn add_lemma(&mut self, eq: Equation) {
        self.lemmas.push(eq);
    }

    fn rule(&self, name: &str) -> Option<&Equation> {
        self.theory
            .axiom(name)
            .or_else(|| self.lemmas.iter().find(|l| l.name.as_deref() == Some(name)))
    }

    pub fn check_script(&mut self, script: &ProofScript) -> Verdict {
        Verdict {
            theorems: script
                .theorems
                .iter()
                .map(|t| self.check_theorem(t))
                .collect(),
        }
    }

    pub fn check_theorem(&mut self, thm: &Theorem) -> TheoremReport {
        let mut report = TheoremReport {
            name: thm.name.clone(),
            items: vec![],
            error: None,
        };
        let stmt = &thm.statement;
        if self.rule(&thm.name).is_some() {
            report.error = Some(RuleError::DuplicateId(thm.name.clone()));
            return report;
        }
        if let Err(e) = validate(stmt) {
            report.error = Some(RuleError::InvalidClaim(e));
            return report;
        }
        if let Err(e) = self.theory.check_equation(stmt) {
            report.error = Some(e.into());
            return report;
        }
        let mut scope = Scope {
            theorem: Some((thm.name.clone(), stmt.clone())),
            ..Scope::default()
        };
        let last = self.check_items(&thm.proof, &mut scope, &mut report.items, 0);
        report.error = match last {
            None => Some(RuleError::EmptyProof),
            Some(k) if !k.eq.sidewise_equiv(stmt) => Some(RuleError::TheoremMismatch {
                found: k.eq.to_string(),
                expected: stmt.to_string(),
            }),
            Some(_) => None,
        };
        if report.accepted() {
            self.lemmas.push(stmt.clone().named(thm.name.clone()));
        }
        report
    }

    fn check_items(
        &self,
        items: &[ProofItem],
        scope: &mut Scope,
        out: &mut Vec<ItemReport>,
        depth: usize,
    ) -> Option<Known> {
        let mut last = None;
        for item in items {
            let id = item.id().to_string();
            let mut nested = Vec::new();
            let (kind, result, claimed) = match item {
                ProofItem::Step(s) => ("step", self.check_step(s, scope), Some(s.claimed.clone())),
                ProofItem::Induction(ind) => {
                    let res = self.check_induction(ind, scope, &mut nested, depth);
                    let goal = self.induction_goal(ind, scope).ok();
                    ("induction", res, goal)
                }
            };
            let duplicate = scope.steps.contains_key(&id) || scope.hyps.contains_key(&id);
            let (error, known) = match result {
                _ if duplicate => (Some(RuleError::DuplicateId(id.clone())), None),
                Ok(k) => (None, Some(k)),
                // Keep going from the claim so later independent errors surface.
                Err(e) => (
                    Some(e),
                    claimed.map(|eq| Known {
                        eq,
                        guard: BTreeSet::new(),
                    }),
                ),
            };
            out.push(ItemReport {
                id: id.clone(),
                kind,
                line: item.line(),
                depth,
                error,
            });
            out.extend(nested);
            if let Some(k) = known {
                if !duplicate {
                    scope.steps.insert(id, k.clone());
                }
                last = Some(k);
            }
        }
        last
    }

    fn premise(&self, scope: &Scope, id: &str) -> Result<Known, RuleError> {
        if let Some(k) = scope.steps.get(id) {
            return Ok(k.clone());
        }
        self.rule(id)
            .map(|eq| Known {
                eq: eq.clone(),
                guard: BTreeSet::new(),
            })
            .ok_or_else(|| RuleError::UnknownStep(id.to_string()))
    }

    /// Apply a specialization. Operations may not target a fixed box or a
    /// name the guard says descends from one. Equations derived inside the
    /// proof start with every fixed box in their guard, so renaming a fixed
    /// box carries the protection to the new name; axioms and lemmas start
    /// with an empty guard because their box names are their own.
    fn apply_spec(
        &self,
        mut k: Known,
        spec: &[SpecOp],
        scope: &Scope,
        derived: bool,
    ) -> Result<Known, RuleError> {
        if derived {
            k.guard.extend(scope.fixed.iter().cloned());
        }
        for s in spec {
            k.eq = match s {
                SpecOp::RenameEdge(a, b) => rename_edge_eq(&k.eq, a, b)?,
                SpecOp::RenameBox(a, b) => {
                    if k.guard.contains(a) {
                        k.guard.insert(b.clone());
                    }
                    rename_box_eq(&k.eq, a, b)?
                }
                SpecOp::Op(op) => {
                    if k.guard.contains(&op.target) || scope.fixed.contains(&op.target) {
                        return Err(RuleError::FixedBoxViolation { op: op.clone() });
                    }
                    apply_op_eq(op, &k.eq)?
                }
                SpecOp::Weaken(a, with) => weaken_eq(&k.eq, a, with)?,
            };
        }
        Ok(k)
    }

    fn check_step(&self, step: &Step, scope: &Scope) -> Result<Known, RuleError> {
        let claimed = &step.claimed;
        validate(claimed).map_err(RuleError::InvalidClaim)?;
        self.theory.check_equation(claimed)?;
        let derived = match &step.just {
            Justification::Equiv(None) => {
                if !matches!(equiv(&claimed.lhs, &claimed.rhs), Ok(true)) {
                    return Err(RuleError::NotEquivalent {
                        lhs: claimed.lhs.to_string(),
                        rhs: claimed.rhs.to_string(),
                    });
                }
                Known {
                    eq: claimed.clone(),
                    guard: BTreeSet::new(),
                }
            }
            Justification::Equiv(Some(id)) => self.premise(scope, id)?,
            Justification::Axiom { name, spec } => {
                let eq = self
                    .rule(name)
                    .ok_or_else(|| RuleError::UnknownAxiom(name.clone()))?;
                self.apply_spec(
                    Known {
                        eq: eq.clone(),
                        guard: BTreeSet::new(),
                    },
                    spec,
                    scope,
                    false,
                )?
            }
            Justification::From { step, spec } => {
                self.apply_spec(self.premise(scope, step)?, spec, scope, true)?
            }
            Justification::Prod { step, with } => {
                let k = self.premise(scope, step)?;
                Known {
                    eq: prod(&k.eq, with)?,
                    guard: k.guard,
                }
            }
            Justification::Box { step, boxname } => {
                let k = self.premise(scope, step)?;
                Known {
                    eq: box_intro(&k.eq, boxname)?,
                    guard: k.guard,
                }
            }
            Justification::Sym(step) => {
                let k = self.premise(scope, step)?;
                Known {
                    eq: k.eq.flip(),
                    guard: k.guard,
                }
            }
            Justification::Trans(ids) => {
                if ids.len() < 2 {
                    return Err(RuleError::ShortTrans);
                }
                let ks = ids
                    .iter()
                    .map(|i| self.premise(scope, i))
                    .collect::<Result<Vec<_>, _>>()?;
                for (i, w) in ks.windows(2).enumerate() {
                    if !matches!(equiv(&w[0].eq.rhs, &w[1].eq.lhs), Ok(true)) {
                        return Err(RuleError::TransGap {
                            left: ids[i].clone(),
                            right: ids[i + 1].clone(),
                        });
                    }
                }
                let guard = ks.iter().flat_map(|k| k.guard.iter().cloned()).collect();
                Known {
                    eq: Equation::new(ks[0].eq.lhs.clone(), ks[ks.len() - 1].eq.rhs.clone()),
                    guard,
                }
            }
            Justification::Hyp { name, spec } => {
                let eq = scope
                    .hyps
                    .get(name)
                    .ok_or_else(|| RuleError::UnknownHypothesis(name.clone()))?;
                if let Some(s) = spec.iter().find(|s| matches!(s, SpecOp::RenameBox(..))) {
                    return Err(RuleError::HypothesisSpecialization(s.to_string()));
                }
                self.apply_spec(
                    Known {
                        eq: eq.clone(),
                        guard: BTreeSet::new(),
                    },
                    spec,
                    scope,
                    true,
                )?
            }
        };
        mismatch(&derived.eq, claimed)?;
        Ok(Known {
            eq: claimed.clone(),
            guard: derived.guard,
        })
    }

    fn induction_goal(&self, ind: &Induction, scope: &Scope) -> Result<Equation, RuleError> {
        match (&ind.goal, &scope.theorem) {
            (Some(g), _) => Ok(g.clone()),
            (None, Some((name, stmt))) if *name == ind.id => Ok(stmt.clone()),
            _ => Err(RuleError::MissingGoal(ind.id.clone())),
        }
    }

    fn check_case(
        &self,
        case: &'static str,
        items: &[ProofItem],
        scope: &mut Scope,
        expected: &Equation,
        out: &mut Vec<ItemReport>,
        depth: usize,
    ) -> Result<(), RuleError> {
        let last = self
            .check_items(items, scope, out, depth + 1)
            .ok_or(RuleError::EmptyCase(case))?;
        if last.eq.sidewise_equiv(expected) {
            Ok(())
        } else {
            Err(RuleError::CaseMismatch {
                case,
                found: last.eq.to_string(),
                expected: expected.to_string(),
            })
        }
    }

    fn check_induction(
        &self,
        ind: &Induction,
        scope: &Scope,
        out: &mut Vec<ItemReport>,
        depth: usize,
    ) -> Result<Known, RuleError> {
        let goal = self.induction_goal(ind, scope)?;
        if ind.goal.is_some() {
            validate(&goal).map_err(RuleError::InvalidClaim)?;
            self.theory.check_equation(&goal)?;
        }
        let b = &ind.boxname;
        if scope.fixed.contains(b) {
            return Err(RuleError::FixedBoxViolation {
                op: BoxOp::new(OpKind::Exp, b.clone()),
            });
        }
        if !(goal.lhs.top_level_boxes().contains(b) && goal.rhs.top_level_boxes().contains(b)) {
            return Err(RuleError::NotTopLevel(b.clone()));
        }
        if let Some(listed) = &ind.fixing {
            if listed.as_slice() != std::slice::from_ref(b) {
                return Err(RuleError::BadFixing {
                    listed: listed.clone(),
                    expected: b.clone(),
                });
            }
        }
        let kill = apply_op_eq(&BoxOp::new(OpKind::Kill, b.clone()), &goal)?;
        let exp = apply_op_eq(&BoxOp::new(OpKind::Exp, b.clone()), &goal)?;

        let mut base_scope = scope.clone();
        let base = self.check_case("base", &ind.base, &mut base_scope, &kill, out, depth);

        let mut step_scope = scope.clone();
        step_scope.fixed.insert(b.clone());
        step_scope.hyps.insert(ind.id.clone(), goal.clone());
        step_scope.hyps.insert(IH.to_string(), goal.clone());
        let step = self.check_case("step", &ind.step, &mut step_scope, &exp, out, depth);

        base?;
        step?;
        Ok(Known {
            eq: goal,
            guard: BTreeSet::new(),
        })
    }
}

//! Equations, theories and proof checking.

pub mod checker;
pub mod derived;
pub mod equation;
pub mod proof;
pub mod theory;

pub use checker::{check_proof, Checker, ItemReport, RuleError, TheoremReport, Verdict};
pub use equation::{check_compatible, instantiate_equation, Equation, EquationError, Mismatch};
pub use proof::{Induction, Justification, ProofItem, ProofScript, SpecOp, Step, Theorem};
pub use theory::{Arity, ArityError, Theory, TheoryError};

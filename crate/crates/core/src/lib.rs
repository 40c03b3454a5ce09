//! Non-commutative !-tensor expressions.
//!
//! Expressions are parsed from a small text syntax, checked for
//! well-formedness, compared up to equivalence through a canonical normal
//! form, and manipulated by the !-box operations Exp, Kill, Copy and Drop.
//! On top of that sit bounded instance enumeration, an equational proof
//! checker with !-box induction, and an array-model evaluator.

pub mod boxops;
pub mod calculus;
pub mod context;
pub mod expr;
pub mod instantiate;
pub mod model;
pub mod names;
pub mod normalize;
pub mod render;
pub mod syntax;
pub mod wellformed;

pub use context::{context, edge_context, nesting, node_context, Context, NotFound};
pub use expr::{EdgeTerm, Factor, Group, Item, Orientation, TensorExpr};
pub use names::{BoxName, DirectedEdge, Direction, EdgeName};
pub use normalize::{equiv, normalize, IllFormed};
pub use syntax::{parse_tensor, print_tensor, ParseError};
pub use wellformed::{check_wellformed, is_wellformed, Condition, Violation};

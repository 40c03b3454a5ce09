//! Array models: concrete tensors evaluated by contracting repeated names.

mod eval;
mod file;
mod instances;
mod matrix;
mod semiring;

pub use eval::{
    evaluate, evaluate_brute_force, word_of, Family, Model, ModelError, TensorValue,
    DEFAULT_TOLERANCE,
};
pub use file::{parse_model, AnyModel, ModelFileError};
pub use instances::{check_equation_instances, InstanceFailure, InstanceReport};
pub use matrix::{matrix_algebra, symmetrized, ANTI, MULTIPLICATION, SPIDER, UNIT};
pub use semiring::Semiring;

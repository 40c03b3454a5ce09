//! Concrete text syntax and JSON interchange.

mod json;
pub(crate) mod parser;
mod printer;
mod theory;

pub use json::{export_json, import_json, JsonError, FORMAT_VERSION};
pub use parser::{parse_tensor, ParseError, SourceSpan};
pub use printer::{print_eterm, print_factor, print_tensor};
pub use theory::{parse_equation, parse_proof, parse_theory, TheoryFileError};

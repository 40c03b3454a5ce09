//! Model files (`.btm`).
//!
//! ```text
//! # 2x2 matrices over the integers
//! builtin matrix_algebra k=2
//! semiring int
//! array m ^vv = 0 1 ...
//! ```
//!
//! `dimension d` declares the axis size when no builtin does. `semiring`
//! takes `int`, `rational` or `float`, the last with an optional
//! `tol=<value>`. Array values are row-major and may continue over several
//! lines. Adding `symmetrized` to the builtin line replaces the
//! multiplication by `xy + yx`.

use num_rational::Rational64;

use super::eval::{Model, ModelError, DEFAULT_TOLERANCE};
use super::instances::{check_equation_instances, InstanceReport};
use super::matrix::{matrix_algebra, symmetrized};
use super::semiring::Semiring;
use crate::calculus::Equation;
use crate::instantiate::InstanceBound;

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum ModelFileError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: {source}")]
    Model { line: usize, source: ModelError },
}

/// A model over one of the supported semirings.
#[derive(Clone, Debug)]
pub enum AnyModel {
    Int(Model<i64>),
    Rational(Model<Rational64>),
    Float(Model<f64>),
}

impl AnyModel {
    pub fn semiring(&self) -> &'static str {
        match self {
            AnyModel::Int(_) => i64::NAME,
            AnyModel::Rational(_) => Rational64::NAME,
            AnyModel::Float(_) => f64::NAME,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            AnyModel::Int(m) => m.dim(),
            AnyModel::Rational(m) => m.dim(),
            AnyModel::Float(m) => m.dim(),
        }
    }

    pub fn check(&self, eq: &Equation, bound: InstanceBound) -> Result<InstanceReport, ModelError> {
        match self {
            AnyModel::Int(m) => check_equation_instances(eq, m, bound),
            AnyModel::Rational(m) => check_equation_instances(eq, m, bound),
            AnyModel::Float(m) => check_equation_instances(eq, m, bound),
        }
    }
}

struct Builtin {
    k: usize,
    symmetrized: bool,
    line: usize,
}

struct ArrayDecl {
    generator: String,
    word: String,
    values: Vec<String>,
    line: usize,
}

#[derive(Default)]
struct Spec {
    builtin: Option<Builtin>,
    dimension: Option<(usize, usize)>,
    semiring: Option<String>,
    tolerance: Option<f64>,
    arrays: Vec<ArrayDecl>,
}

fn syntax(line: usize, message: impl Into<String>) -> ModelFileError {
    ModelFileError::Syntax {
        line,
        message: message.into(),
    }
}

fn parse_spec(text: &str) -> Result<Spec, ModelFileError> {
    let mut spec = Spec::default();
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut words = content.split_whitespace();
        let head = words.next().expect("non-empty line");
        match head {
            "builtin" => {
                if words.next() != Some("matrix_algebra") {
                    return Err(syntax(line, "the only builtin is matrix_algebra"));
                }
                let mut k = None;
                let mut sym = false;
                for w in words {
                    match w.strip_prefix("k=") {
                        Some(v) => {
                            k = Some(
                                v.parse::<usize>()
                                    .map_err(|_| syntax(line, format!("bad k {v:?}")))?,
                            )
                        }
                        None if w == "symmetrized" => sym = true,
                        None => return Err(syntax(line, format!("unexpected {w:?}"))),
                    }
                }
                let k = k.ok_or_else(|| syntax(line, "matrix_algebra needs k=<size>"))?;
                spec.builtin = Some(Builtin {
                    k,
                    symmetrized: sym,
                    line,
                });
            }
            "dimension" => {
                let d = words
                    .next()
                    .and_then(|w| w.parse().ok())
                    .ok_or_else(|| syntax(line, "dimension needs a number"))?;
                spec.dimension = Some((d, line));
            }
            "semiring" => {
                let s = words
                    .next()
                    .ok_or_else(|| syntax(line, "semiring needs a name"))?;
                if !["int", "rational", "float"].contains(&s) {
                    return Err(syntax(line, format!("unknown semiring {s:?}")));
                }
                spec.semiring = Some(s.to_string());
                for w in words {
                    let v = w
                        .strip_prefix("tol=")
                        .ok_or_else(|| syntax(line, format!("unexpected {w:?}")))?;
                    spec.tolerance = Some(
                        v.parse()
                            .map_err(|_| syntax(line, format!("bad tolerance {v:?}")))?,
                    );
                }
            }
            "array" => {
                let generator = words
                    .next()
                    .ok_or_else(|| syntax(line, "array needs a generator name"))?
                    .to_string();
                let word = words
                    .next()
                    .ok_or_else(|| syntax(line, "array needs an arity word"))?
                    .to_string();
                if words.next() != Some("=") {
                    return Err(syntax(line, "expected `=` after the arity word"));
                }
                spec.arrays.push(ArrayDecl {
                    generator,
                    word,
                    values: words.map(str::to_string).collect(),
                    line,
                });
            }
            _ if head
                .chars()
                .next()
                .is_some_and(|c| c.is_ascii_digit() || c == '-' || c == '.') =>
            {
                let last = spec
                    .arrays
                    .last_mut()
                    .ok_or_else(|| syntax(line, "values outside an array"))?;
                last.values
                    .extend(content.split_whitespace().map(str::to_string));
            }
            _ => return Err(syntax(line, format!("unknown directive {head:?}"))),
        }
    }
    Ok(spec)
}

trait ParseScalar: Semiring {
    fn parse_scalar(s: &str) -> Option<Self>;
}

impl ParseScalar for i64 {
    fn parse_scalar(s: &str) -> Option<Self> {
        s.parse().ok()
    }
}

impl ParseScalar for Rational64 {
    fn parse_scalar(s: &str) -> Option<Self> {
        s.parse().ok()
    }
}

impl ParseScalar for f64 {
    fn parse_scalar(s: &str) -> Option<Self> {
        s.parse().ok()
    }
}

fn build<S: ParseScalar>(spec: &Spec) -> Result<Model<S>, ModelFileError> {
    let mut model = match (&spec.builtin, spec.dimension) {
        (Some(b), dim) => {
            let mut m = matrix_algebra::<S>(b.k).map_err(|source| ModelFileError::Model {
                line: b.line,
                source,
            })?;
            if let Some((d, line)) = dim.filter(|(d, _)| *d != m.dim()) {
                return Err(syntax(
                    line,
                    format!(
                        "dimension {d} conflicts with matrix_algebra k={} (d={})",
                        b.k,
                        m.dim()
                    ),
                ));
            }
            if b.symmetrized {
                m = symmetrized(&m).map_err(|source| ModelFileError::Model {
                    line: b.line,
                    source,
                })?;
            }
            m
        }
        (None, Some((d, line))) => {
            Model::new(d).map_err(|source| ModelFileError::Model { line, source })?
        }
        (None, None) => return Err(syntax(1, "a model needs a `dimension` or a `builtin`")),
    };
    model = model.with_tolerance(spec.tolerance.unwrap_or(DEFAULT_TOLERANCE));
    for a in &spec.arrays {
        let values = a
            .values
            .iter()
            .map(|v| {
                S::parse_scalar(v)
                    .ok_or_else(|| syntax(a.line, format!("{v:?} is not a {} value", S::NAME)))
            })
            .collect::<Result<Vec<_>, _>>()?;
        model
            .assign(&a.generator, &a.word, values)
            .map_err(|source| ModelFileError::Model {
                line: a.line,
                source,
            })?;
    }
    Ok(model)
}

/// Parse a model file.
pub fn parse_model(text: &str) -> Result<AnyModel, ModelFileError> {
    let spec = parse_spec(text)?;
    Ok(match spec.semiring.as_deref().unwrap_or("int") {
        "rational" => AnyModel::Rational(build(&spec)?),
        "float" => AnyModel::Float(build(&spec)?),
        _ => AnyModel::Int(build(&spec)?),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_equation;

    #[test]
    fn builtin_file() {
        let m = parse_model("# matrices\nbuiltin matrix_algebra k=2\nsemiring int\n").unwrap();
        assert_eq!((m.semiring(), m.dim()), ("int", 4));
        let eq = parse_equation("a{+o -p} u{+p} = u{+o}").unwrap();
        assert!(m.check(&eq, InstanceBound(0)).unwrap().passed());
    }

    #[test]
    fn explicit_arrays_over_several_lines() {
        let text = "dimension 2\nsemiring rational\narray f ^v = 1/2 0\n  0 1/2\narray e ^ = 1 1\n";
        let AnyModel::Rational(m) = parse_model(text).unwrap() else {
            panic!()
        };
        assert_eq!(m.array("f", "^v").unwrap()[0], Rational64::new(1, 2));
        let eq = parse_equation("f{+o -p} e{+p} = f{+o -p} e{+p}").unwrap();
        assert!(check_equation_instances(&eq, &m, InstanceBound(0))
            .unwrap()
            .passed());
    }

    #[test]
    fn float_tolerance() {
        let text = "dimension 1\nsemiring float tol=1e-3\narray f ^ = 1.0004\narray g ^ = 1\n";
        let m = parse_model(text).unwrap();
        assert!(m
            .check(&parse_equation("f{+o} = g{+o}").unwrap(), InstanceBound(0))
            .unwrap()
            .passed());
        let strict =
            parse_model("dimension 1\nsemiring float\narray f ^ = 1.0004\narray g ^ = 1\n")
                .unwrap();
        assert!(!strict
            .check(&parse_equation("f{+o} = g{+o}").unwrap(), InstanceBound(0))
            .unwrap()
            .passed());
    }

    #[test]
    fn errors_name_the_line() {
        let e = parse_model("dimension 2\narray f ^v = 1 2 3\n").unwrap_err();
        assert!(
            matches!(
                e,
                ModelFileError::Model {
                    line: 2,
                    source: ModelError::ArityMismatch { .. }
                }
            ),
            "{e}"
        );
        let e = parse_model("dimension 2\nsemiring complex\n").unwrap_err();
        assert!(matches!(e, ModelFileError::Syntax { line: 2, .. }));
        assert!(parse_model("semiring int\n").is_err());
        assert!(parse_model("builtin matrix_algebra k=2\ndimension 3\n").is_err());
    }
}

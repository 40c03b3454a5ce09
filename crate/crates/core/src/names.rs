//! Edge names, !-box names and directed edges.
//!
//! Edge names start with a lowercase letter and box names with an uppercase
//! letter. Both may carry trailing `.k` numeric suffixes, which is how fresh
//! names are minted.

use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
#[error("invalid {kind} name `{name}`")]
pub struct InvalidName {
    pub kind: &'static str,
    pub name: String,
}

fn valid_ident(s: &str, first_ok: impl Fn(char) -> bool) -> bool {
    let mut parts = s.split('.');
    let head = match parts.next() {
        Some(h) => h,
        None => return false,
    };
    let mut chars = head.chars();
    match chars.next() {
        Some(c) if first_ok(c) => {}
        _ => return false,
    }
    if !chars.all(|c| c.is_ascii_alphanumeric() || c == '_') {
        return false;
    }
    parts.all(|p| !p.is_empty() && p.chars().all(|c| c.is_ascii_digit()))
}

macro_rules! name_type {
    ($(#[$m:meta])* $ty:ident, $kind:literal, $first:expr) => {
        $(#[$m])*
        #[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(try_from = "String", into = "String")]
        pub struct $ty(String);

        impl $ty {
            pub fn new(s: impl Into<String>) -> Result<Self, InvalidName> {
                let s = s.into();
                if valid_ident(&s, $first) {
                    Ok(Self(s))
                } else {
                    Err(InvalidName { kind: $kind, name: s })
                }
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }

            /// The name with its final `.k` suffix removed, if any.
            pub fn base(&self) -> &str {
                match self.0.rsplit_once('.') {
                    Some((b, _)) => b,
                    None => &self.0,
                }
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl fmt::Debug for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl TryFrom<String> for $ty {
            type Error = InvalidName;
            fn try_from(s: String) -> Result<Self, InvalidName> {
                Self::new(s)
            }
        }

        impl From<$ty> for String {
            fn from(n: $ty) -> String {
                n.0
            }
        }
    };
}

name_type!(
    /// A name drawn from the edge namespace.
    EdgeName,
    "edge",
    |c: char| c.is_ascii_lowercase()
);
name_type!(
    /// A name drawn from the !-box namespace.
    BoxName,
    "box",
    |c: char| c.is_ascii_uppercase()
);

/// Shorthand used heavily in tests: panics on invalid input.
pub fn edge(s: &str) -> EdgeName {
    EdgeName::new(s).expect("valid edge name")
}

pub fn bx(s: &str) -> BoxName {
    BoxName::new(s).expect("valid box name")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// `+a`
    Out,
    /// `-a`
    In,
}

impl Direction {
    pub fn flip(self) -> Self {
        match self {
            Direction::Out => Direction::In,
            Direction::In => Direction::Out,
        }
    }

    pub fn sign(self) -> char {
        match self {
            Direction::Out => '+',
            Direction::In => '-',
        }
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DirectedEdge {
    pub name: EdgeName,
    pub dir: Direction,
}

impl DirectedEdge {
    pub fn out(name: EdgeName) -> Self {
        Self {
            name,
            dir: Direction::Out,
        }
    }

    pub fn inp(name: EdgeName) -> Self {
        Self {
            name,
            dir: Direction::In,
        }
    }

    pub fn partner(&self) -> Self {
        Self {
            name: self.name.clone(),
            dir: self.dir.flip(),
        }
    }
}

impl fmt::Display for DirectedEdge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.dir.sign(), self.name)
    }
}

impl fmt::Debug for DirectedEdge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl std::str::FromStr for DirectedEdge {
    type Err = InvalidName;

    fn from_str(s: &str) -> Result<Self, InvalidName> {
        let bad = || InvalidName {
            kind: "directed edge",
            name: s.to_string(),
        };
        let mut chars = s.chars();
        let dir = match chars.next() {
            Some('+') => Direction::Out,
            Some('-') => Direction::In,
            _ => return Err(bad()),
        };
        let name = EdgeName::new(chars.as_str()).map_err(|_| bad())?;
        Ok(Self { name, dir })
    }
}

//! Recursive-descent parser over a byte cursor.
//!
//! The cursor is shared by the tensor, theory and proof grammars so spans are
//! consistent across file kinds.

use std::fmt;

use crate::expr::{EdgeTerm, Factor, Group, Item, Orientation, TensorExpr};
use crate::names::{BoxName, DirectedEdge, Direction, EdgeName};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SourceSpan {
    pub begin: usize,
    pub end: usize,
    pub line: usize,
    pub column: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub struct ParseError {
    pub span: SourceSpan,
    pub expected: Vec<String>,
    pub found: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: expected ", self.span.line, self.span.column)?;
        match self.expected.as_slice() {
            [] => write!(f, "nothing")?,
            [one] => write!(f, "{one}")?,
            many => write!(f, "one of {}", many.join(", "))?,
        }
        write!(f, ", found {}", self.found)
    }
}

pub(crate) struct Cursor<'a> {
    src: &'a str,
    pos: usize,
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

impl<'a> Cursor<'a> {
    pub(crate) fn new(src: &'a str) -> Self {
        Self { src, pos: 0 }
    }

    pub(crate) fn pos(&self) -> usize {
        self.pos
    }

    pub(crate) fn reset(&mut self, pos: usize) {
        self.pos = pos;
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    pub(crate) fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    /// Skip whitespace and `#` line comments.
    pub(crate) fn ws(&mut self) {
        loop {
            match self.peek() {
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                Some('#') => {
                    while let Some(c) = self.bump() {
                        if c == '\n' {
                            break;
                        }
                    }
                }
                _ => break,
            }
        }
    }

    /// Skip spaces, tabs and comments but stop at a newline.
    pub(crate) fn inline_ws(&mut self) {
        loop {
            match self.peek() {
                Some(' ') | Some('\t') | Some('\r') => {
                    self.bump();
                }
                Some('#') => {
                    while let Some(c) = self.peek() {
                        if c == '\n' {
                            break;
                        }
                        self.bump();
                    }
                }
                _ => break,
            }
        }
    }

    pub(crate) fn at_end(&self) -> bool {
        self.pos >= self.src.len()
    }

    pub(crate) fn span_at(&self, begin: usize, end: usize) -> SourceSpan {
        let before = &self.src[..begin];
        let line = before.matches('\n').count() + 1;
        let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        SourceSpan {
            begin,
            end,
            line,
            column,
        }
    }

    fn found(&self) -> String {
        match self.peek() {
            None => "end of input".to_string(),
            Some(_) => {
                let tok: String = self
                    .rest()
                    .chars()
                    .take_while(|c| !c.is_whitespace())
                    .take(12)
                    .collect();
                format!("`{tok}`")
            }
        }
    }

    pub(crate) fn error(&self, expected: &[&str]) -> ParseError {
        let end = (self.pos + self.peek().map_or(0, |c| c.len_utf8())).min(self.src.len());
        ParseError {
            span: self.span_at(self.pos, end),
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: self.found(),
        }
    }

    pub(crate) fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    pub(crate) fn eat_str(&mut self, s: &str) -> bool {
        if self.rest().starts_with(s) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    pub(crate) fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(&[&format!("`{c}`")]))
        }
    }

    /// Read a raw identifier including `.k` suffix segments.
    pub(crate) fn raw_ident(&mut self) -> Option<&'a str> {
        let start = self.pos;
        match self.peek() {
            Some(c) if c.is_ascii_alphabetic() => {}
            _ => return None,
        }
        while let Some(c) = self.peek() {
            // A dot continues the name only before a digit, as in `x.1`.
            let dotted = c == '.' && self.rest()[1..].starts_with(|d: char| d.is_ascii_digit());
            if is_ident_char(c) || dotted {
                self.bump();
            } else {
                break;
            }
        }
        Some(&self.src[start..self.pos])
    }

    /// Consume `kw` if it appears as a whole word.
    pub(crate) fn keyword(&mut self, kw: &str) -> bool {
        let save = self.pos;
        if self.raw_ident() == Some(kw) {
            true
        } else {
            self.pos = save;
            false
        }
    }

    pub(crate) fn expect_keyword(&mut self, kw: &str) -> Result<(), ParseError> {
        if self.keyword(kw) {
            Ok(())
        } else {
            Err(self.error(&[&format!("`{kw}`")]))
        }
    }

    pub(crate) fn edge_name(&mut self) -> Result<EdgeName, ParseError> {
        let save = self.pos;
        match self.raw_ident().map(EdgeName::new) {
            Some(Ok(n)) => Ok(n),
            _ => {
                self.pos = save;
                Err(self.error(&["edge name"]))
            }
        }
    }

    pub(crate) fn box_name(&mut self) -> Result<BoxName, ParseError> {
        let save = self.pos;
        match self.raw_ident().map(BoxName::new) {
            Some(Ok(n)) => Ok(n),
            _ => {
                self.pos = save;
                Err(self.error(&["box name"]))
            }
        }
    }

    pub(crate) fn plain_ident(&mut self, what: &str) -> Result<&'a str, ParseError> {
        self.raw_ident().ok_or_else(|| self.error(&[what]))
    }

    fn dedge(&mut self) -> Result<DirectedEdge, ParseError> {
        let dir = if self.eat('+') {
            Direction::Out
        } else if self.eat('-') {
            Direction::In
        } else {
            return Err(self.error(&["`+`", "`-`"]));
        };
        Ok(DirectedEdge {
            name: self.edge_name()?,
            dir,
        })
    }

    fn eterm_into(&mut self, items: &mut Vec<Item>) -> Result<(), ParseError> {
        loop {
            self.ws();
            match self.peek() {
                Some('+') | Some('-') => items.push(Item::Edge(self.dedge()?)),
                Some('(') => {
                    self.bump();
                    self.eterm_into(items)?;
                    self.ws();
                    self.expect(')')?;
                }
                Some('[') => {
                    self.bump();
                    let body = self.eterm()?;
                    self.ws();
                    self.expect('>')?;
                    let boxname = self.box_name()?;
                    items.push(Item::Group(Group {
                        orientation: Orientation::Clockwise,
                        boxname,
                        body,
                    }));
                }
                Some('<') => {
                    self.bump();
                    let body = self.eterm()?;
                    self.ws();
                    self.expect(']')?;
                    let boxname = self.box_name()?;
                    items.push(Item::Group(Group {
                        orientation: Orientation::Anticlockwise,
                        boxname,
                        body,
                    }));
                }
                _ => return Ok(()),
            }
        }
    }

    fn eterm(&mut self) -> Result<EdgeTerm, ParseError> {
        let mut items = Vec::new();
        self.eterm_into(&mut items)?;
        Ok(EdgeTerm { items })
    }

    fn factor(&mut self) -> Result<Option<Factor>, ParseError> {
        self.ws();
        let save = self.pos;
        match self.peek() {
            Some('1') => {
                self.bump();
                if self.peek().is_some_and(is_ident_char) {
                    self.pos = save;
                    return Err(self.error(&["factor"]));
                }
                Ok(Some(Factor::Empty))
            }
            Some('[') => {
                self.bump();
                let body = self.tensor_body()?;
                self.ws();
                self.expect(']')?;
                let name = self.box_name()?;
                Ok(Some(Factor::Box { name, body }))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let name = self.raw_ident().unwrap_or_default();
                if self.peek() != Some('{') {
                    // Not a factor: a keyword of an enclosing grammar.
                    self.pos = save;
                    return Ok(None);
                }
                self.bump();
                let f = if name == "id" {
                    self.ws();
                    let a = self.dedge()?;
                    self.ws();
                    let b = self.dedge()?;
                    match (a.dir, b.dir) {
                        (Direction::Out, Direction::In) => Factor::Id {
                            out: a.name,
                            inp: b.name,
                        },
                        (Direction::In, Direction::Out) => Factor::Id {
                            out: b.name,
                            inp: a.name,
                        },
                        _ => {
                            self.pos = save;
                            return Err(self.error(&["identity with one `+` and one `-` edge"]));
                        }
                    }
                } else {
                    Factor::Gen {
                        name: name.to_string(),
                        eterm: self.eterm()?,
                    }
                };
                self.ws();
                self.expect('}')?;
                Ok(Some(f))
            }
            _ => Ok(None),
        }
    }

    fn tensor_body(&mut self) -> Result<TensorExpr, ParseError> {
        let mut factors = Vec::new();
        while let Some(f) = self.factor()? {
            factors.push(f);
        }
        if factors.is_empty() {
            factors.push(Factor::Empty);
        }
        Ok(TensorExpr { factors })
    }

    /// Parse a tensor and stop at the first token that cannot start a factor.
    pub(crate) fn tensor(&mut self) -> Result<TensorExpr, ParseError> {
        self.tensor_body()
    }
}

/// Parse a complete `.bt` text.
pub fn parse_tensor(text: &str) -> Result<TensorExpr, ParseError> {
    let mut c = Cursor::new(text);
    let t = c.tensor()?;
    c.ws();
    if !c.at_end() {
        return Err(c.error(&["factor", "end of input"]));
    }
    Ok(t)
}

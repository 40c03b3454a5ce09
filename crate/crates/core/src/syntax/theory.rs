//! Theory files (`.bth`) and proof scripts (`.btp`).
//!
//! ```text
//! gen m : ^vv
//! gen s : ^(v)*
//! axiom unit: m{+o -p -x} u{+p} = id{+o -x}
//!
//! theorem t: G = H
//! proof
//!   step s1: G = K by axiom unit rename x->y
//!   induction B on t
//!   base { ... }
//!   step fixing B { ... }
//! qed
//! ```

use super::parser::{Cursor, ParseError};
use crate::boxops::{BoxOp, OpKind};
use crate::calculus::{
    Arity, Equation, Induction, Justification, ProofItem, ProofScript, SpecOp, Step, Theorem,
    Theory, TheoryError,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TheoryFileError {
    #[error("{0}")]
    Parse(#[from] ParseError),
    #[error("{line}: {source}")]
    Theory { line: usize, source: TheoryError },
}

const ITEM_KEYWORDS: &[&str] = &["step", "induction", "qed", "base", "theorem", "proof"];

impl<'a> Cursor<'a> {
    fn line(&self) -> usize {
        self.span_at(self.pos(), self.pos()).line
    }

    fn equation(&mut self) -> Result<Equation, ParseError> {
        let lhs = self.tensor()?;
        self.ws();
        self.expect('=')?;
        let rhs = self.tensor()?;
        Ok(Equation::new(lhs, rhs))
    }

    fn ident(&mut self, what: &str) -> Result<String, ParseError> {
        self.ws();
        self.plain_ident(what).map(str::to_string)
    }

    /// An identifier on the current line that is not a structural keyword.
    fn ident_on_line(&mut self) -> Option<String> {
        self.inline_ws();
        let save = self.pos();
        match self.raw_ident() {
            Some(id) if !ITEM_KEYWORDS.contains(&id) => Some(id.to_string()),
            _ => {
                self.reset(save);
                None
            }
        }
    }

    fn arrow(&mut self) -> Result<(), ParseError> {
        self.ws();
        if self.eat_str("->") {
            Ok(())
        } else {
            Err(self.error(&["`->`"]))
        }
    }

    fn spec_ops(&mut self) -> Result<Vec<SpecOp>, ParseError> {
        let mut out = Vec::new();
        loop {
            self.ws();
            let op = if self.keyword("rename") {
                self.ws();
                let a = self.edge_name()?;
                self.arrow()?;
                self.ws();
                SpecOp::RenameEdge(a, self.edge_name()?)
            } else if self.keyword("boxrename") {
                self.ws();
                let a = self.box_name()?;
                self.arrow()?;
                self.ws();
                SpecOp::RenameBox(a, self.box_name()?)
            } else if self.keyword("weaken") {
                self.ws();
                let a = self.box_name()?;
                SpecOp::Weaken(a, self.tensor()?)
            } else if let Some(kind) = self.op_kind() {
                self.ws();
                SpecOp::Op(BoxOp::new(kind, self.box_name()?))
            } else {
                return Ok(out);
            };
            out.push(op);
        }
    }

    fn op_kind(&mut self) -> Option<OpKind> {
        [
            ("exp", OpKind::Exp),
            ("kill", OpKind::Kill),
            ("copy", OpKind::Copy),
            ("drop", OpKind::Drop),
        ]
        .into_iter()
        .find(|(kw, _)| self.keyword(kw))
        .map(|(_, k)| k)
    }

    fn justification(&mut self) -> Result<Justification, ParseError> {
        self.ws();
        if self.keyword("equiv") {
            return Ok(Justification::Equiv(self.ident_on_line()));
        }
        if self.keyword("axiom") {
            let name = self.ident("axiom or lemma name")?;
            return Ok(Justification::Axiom {
                name,
                spec: self.spec_ops()?,
            });
        }
        if self.keyword("from") {
            let step = self.ident("step name")?;
            return Ok(Justification::From {
                step,
                spec: self.spec_ops()?,
            });
        }
        if self.keyword("prod") {
            let step = self.ident("step name")?;
            self.ws();
            self.expect_keyword("with")?;
            return Ok(Justification::Prod {
                step,
                with: self.tensor()?,
            });
        }
        if self.keyword("box") {
            let step = self.ident("step name")?;
            self.ws();
            self.expect_keyword("in")?;
            self.ws();
            return Ok(Justification::Box {
                step,
                boxname: self.box_name()?,
            });
        }
        if self.keyword("sym") {
            return Ok(Justification::Sym(self.ident("step name")?));
        }
        if self.keyword("trans") {
            let mut ids = vec![self.ident("step name")?];
            while let Some(id) = self.ident_on_line() {
                ids.push(id);
            }
            return Ok(Justification::Trans(ids));
        }
        if self.keyword("hyp") {
            let name = self.ident("hypothesis name")?;
            return Ok(Justification::Hyp {
                name,
                spec: self.spec_ops()?,
            });
        }
        Err(self.error(&[
            "`equiv`", "`axiom`", "`from`", "`prod`", "`box`", "`sym`", "`trans`", "`hyp`",
        ]))
    }

    fn block(&mut self) -> Result<Vec<ProofItem>, ParseError> {
        self.ws();
        self.expect('{')?;
        let items = self.items()?;
        self.ws();
        self.expect('}')?;
        Ok(items)
    }

    fn items(&mut self) -> Result<Vec<ProofItem>, ParseError> {
        let mut out = Vec::new();
        loop {
            self.ws();
            let line = self.line();
            if self.keyword("step") {
                let id = self.ident("step name")?;
                self.ws();
                self.expect(':')?;
                let claimed = self.equation()?;
                self.ws();
                self.expect_keyword("by")?;
                let just = self.justification()?;
                out.push(ProofItem::Step(Step {
                    id,
                    claimed,
                    just,
                    line,
                }));
            } else if self.keyword("induction") {
                self.ws();
                let boxname = self.box_name()?;
                self.ws();
                self.expect_keyword("on")?;
                let id = self.ident("goal name")?;
                self.ws();
                let goal = if self.eat(':') {
                    Some(self.equation()?)
                } else {
                    None
                };
                self.ws();
                self.expect_keyword("base")?;
                let base = self.block()?;
                self.ws();
                self.expect_keyword("step")?;
                self.ws();
                let fixing = if self.keyword("fixing") {
                    let mut boxes = Vec::new();
                    loop {
                        self.ws();
                        boxes.push(self.box_name()?);
                        self.ws();
                        if !self.eat(',') {
                            break;
                        }
                    }
                    Some(boxes)
                } else {
                    None
                };
                let step = self.block()?;
                out.push(ProofItem::Induction(Induction {
                    id,
                    goal,
                    boxname,
                    base,
                    step,
                    fixing,
                    line,
                }));
            } else {
                return Ok(out);
            }
        }
    }
}

/// Parse `G = H`.
pub fn parse_equation(text: &str) -> Result<Equation, ParseError> {
    let mut c = Cursor::new(text);
    let eq = c.equation()?;
    c.ws();
    if !c.at_end() {
        return Err(c.error(&["end of input"]));
    }
    Ok(eq)
}

/// Parse a proof script.
pub fn parse_proof(text: &str) -> Result<ProofScript, ParseError> {
    let mut c = Cursor::new(text);
    let mut theorems = Vec::new();
    loop {
        c.ws();
        if c.at_end() {
            return Ok(ProofScript { theorems });
        }
        let line = c.line();
        c.expect_keyword("theorem")?;
        let name = c.ident("theorem name")?;
        c.ws();
        c.expect(':')?;
        let statement = c.equation()?.named(name.clone());
        c.ws();
        c.expect_keyword("proof")?;
        let proof = c.items()?;
        c.ws();
        if !c.keyword("qed") {
            return Err(c.error(&["`step`", "`induction`", "`qed`"]));
        }
        theorems.push(Theorem {
            name,
            statement,
            proof,
            line,
        });
    }
}

/// Parse and validate a theory file.
pub fn parse_theory(text: &str) -> Result<Theory, TheoryFileError> {
    let mut c = Cursor::new(text);
    let mut theory = Theory::new();
    loop {
        c.ws();
        if c.at_end() {
            return Ok(theory);
        }
        let line = c.line();
        if c.keyword("gen") {
            let name = c.ident("generator name")?;
            c.ws();
            c.expect(':')?;
            c.inline_ws();
            let start = c.pos();
            let mut text = String::new();
            while let Some(ch) = c.peek() {
                if ch == '\n' || ch == '#' {
                    break;
                }
                text.push(ch);
                c.eat(ch);
            }
            let arity = Arity::parse(text.trim()).map_err(|e| {
                let mut err = c.error(&["arity pattern over ^, v, (, ), *"]);
                err.span = c.span_at(start, c.pos());
                err.found = format!("`{}` ({})", e.text, e.reason);
                err
            })?;
            theory
                .declare(name, arity)
                .map_err(|source| TheoryFileError::Theory { line, source })?;
        } else if c.keyword("axiom") {
            let name = c.ident("axiom name")?;
            c.ws();
            c.expect(':')?;
            let eq = c.equation()?.named(name);
            theory
                .add_axiom(eq)
                .map_err(|source| TheoryFileError::Theory { line, source })?;
        } else {
            return Err(c.error(&["`gen`", "`axiom`"]).into());
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::names::bx;

    #[test]
    fn theory_file() {
        let th = parse_theory(
            "gen m : ^vv  # binary\ngen u : ^\naxiom unitR: m{+o -x -p} u{+p} = id{+o -x}\n",
        )
        .unwrap();
        assert_eq!(th.generators.len(), 2);
        assert_eq!(th.axiom("unitR").unwrap().rhs.to_string(), "id{+o -x}");
    }

    #[test]
    fn theory_errors_carry_lines() {
        let e = parse_theory("gen m : ^vv\naxiom bad: m{+o -x} = m{+o -x}\n").unwrap_err();
        assert!(matches!(e, TheoryFileError::Theory { line: 2, .. }), "{e}");
        assert!(parse_theory("gen m : ^x\n").is_err());
    }

    #[test]
    fn proof_script() {
        let text = "theorem t: f{+a} = f{+a}\nproof\n  step s1: f{+a} = f{+a} by equiv\n  step s2: f{+a} = f{+a} by trans s1 s1\n  induction B on g: f{[+a>B} []B = f{[+a>B} []B\n  base { step b1: f{} = f{} by equiv }\n  step fixing B { step c1: f{[+a>B +a.1} []B = f{[+a>B +a.1} []B by hyp g rename a->q exp C weaken B g{} }\nqed\n";
        let p = parse_proof(text).unwrap();
        let t = &p.theorems[0];
        assert_eq!(t.proof.len(), 3);
        let ProofItem::Step(s2) = &t.proof[1] else {
            panic!()
        };
        assert_eq!(
            s2.just,
            Justification::Trans(vec!["s1".into(), "s1".into()])
        );
        assert_eq!(s2.line, 4);
        let ProofItem::Induction(ind) = &t.proof[2] else {
            panic!()
        };
        assert_eq!(ind.fixing, Some(vec![bx("B")]));
        let ProofItem::Step(c1) = &ind.step[0] else {
            panic!()
        };
        let Justification::Hyp { spec, .. } = &c1.just else {
            panic!()
        };
        assert_eq!(spec.len(), 3);
    }

    #[test]
    fn equiv_reference_is_optional() {
        let p = parse_proof(
            "theorem t: 1 = 1\nproof\n step a: 1 = 1 by equiv\n step b: 1 = 1 by equiv a\nqed",
        )
        .unwrap();
        let ids: Vec<_> = p.theorems[0]
            .proof
            .iter()
            .map(|i| match i {
                ProofItem::Step(s) => s.just.clone(),
                _ => unreachable!(),
            })
            .collect();
        assert_eq!(
            ids,
            vec![
                Justification::Equiv(None),
                Justification::Equiv(Some("a".into()))
            ]
        );
    }
}

use std::fmt::{self, Write};

use crate::expr::{EdgeTerm, Factor, Item, Orientation, TensorExpr};

pub fn write_eterm(out: &mut impl Write, t: &EdgeTerm) -> fmt::Result {
    for (i, it) in t.items.iter().enumerate() {
        if i > 0 {
            out.write_char(' ')?;
        }
        match it {
            Item::Edge(e) => write!(out, "{e}")?,
            Item::Group(g) => match g.orientation {
                Orientation::Clockwise => {
                    out.write_char('[')?;
                    write_eterm(out, &g.body)?;
                    write!(out, ">{}", g.boxname)?;
                }
                Orientation::Anticlockwise => {
                    out.write_char('<')?;
                    write_eterm(out, &g.body)?;
                    write!(out, "]{}", g.boxname)?;
                }
            },
        }
    }
    Ok(())
}

pub fn write_factor(out: &mut impl Write, f: &Factor) -> fmt::Result {
    match f {
        Factor::Empty => out.write_char('1'),
        Factor::Id { out: a, inp: b } => write!(out, "id{{+{a} -{b}}}"),
        Factor::Gen { name, eterm } => {
            write!(out, "{name}{{")?;
            write_eterm(out, eterm)?;
            out.write_char('}')
        }
        Factor::Box { name, body } => {
            out.write_char('[')?;
            write_tensor(out, body)?;
            write!(out, "]{name}")
        }
    }
}

pub fn write_tensor(out: &mut impl Write, g: &TensorExpr) -> fmt::Result {
    if g.factors.is_empty() {
        return out.write_char('1');
    }
    for (i, f) in g.factors.iter().enumerate() {
        if i > 0 {
            out.write_char(' ')?;
        }
        write_factor(out, f)?;
    }
    Ok(())
}

pub fn print_tensor(g: &TensorExpr) -> String {
    let mut s = String::new();
    write_tensor(&mut s, g).expect("writing to a String cannot fail");
    s
}

pub fn print_eterm(t: &EdgeTerm) -> String {
    let mut s = String::new();
    write_eterm(&mut s, t).expect("writing to a String cannot fail");
    s
}

pub fn print_factor(f: &Factor) -> String {
    let mut s = String::new();
    write_factor(&mut s, f).expect("writing to a String cannot fail");
    s
}

impl fmt::Display for TensorExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_tensor(f, self)
    }
}

impl fmt::Display for EdgeTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_eterm(f, self)
    }
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_factor(f, self)
    }
}

#[cfg(test)]
mod tests {
    use crate::syntax::parse_tensor;

    #[test]
    fn printer_fixpoint() {
        let src = "phi{+a [<(-e)]B>A <(-d)]C} [psi{+d -c}]C [[psi{+e -b}]B]A";
        let once = parse_tensor(src).unwrap().to_string();
        assert_eq!(
            once,
            "phi{+a [<-e]B>A <-d]C} [psi{+d -c}]C [[psi{+e -b}]B]A"
        );
        assert_eq!(parse_tensor(&once).unwrap().to_string(), once);
    }

    #[test]
    fn empty_forms() {
        assert_eq!(parse_tensor("1").unwrap().to_string(), "1");
        assert_eq!(parse_tensor("[]A").unwrap().to_string(), "[1]A");
        assert_eq!(
            parse_tensor("phi{[>A} []A").unwrap().to_string(),
            "phi{[>A} [1]A"
        );
    }
}

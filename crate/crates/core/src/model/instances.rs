use std::fmt;

use super::eval::{evaluate, Model, ModelError};
use super::semiring::Semiring;
use crate::calculus::Equation;
use crate::expr::TensorExpr;
use crate::instantiate::{instantiate_pair, InstanceBound};

#[derive(Clone, Debug, PartialEq)]
pub struct InstanceFailure {
    /// The instantiation, as a sequence of box operations.
    pub ops: String,
    pub lhs: TensorExpr,
    pub rhs: TensorExpr,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct InstanceReport {
    pub equation: String,
    pub checked: usize,
    pub failures: Vec<InstanceFailure>,
}

impl InstanceReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

impl fmt::Display for InstanceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.passed() {
            return write!(
                f,
                "{}: {} instances, all equal",
                self.equation, self.checked
            );
        }
        write!(
            f,
            "{}: {} of {} instances differ",
            self.equation,
            self.failures.len(),
            self.checked
        )?;
        for fail in &self.failures {
            let ops = if fail.ops.is_empty() {
                "(none)"
            } else {
                fail.ops.as_str()
            };
            write!(
                f,
                "\n  instance {ops}: {} = {}\n    {}",
                fail.lhs, fail.rhs, fail.reason
            )?;
        }
        Ok(())
    }
}

/// Evaluate both sides of every bounded instance of an equation and compare.
pub fn check_equation_instances<S: Semiring>(
    eq: &Equation,
    m: &Model<S>,
    bound: InstanceBound,
) -> Result<InstanceReport, ModelError> {
    let fixed = eq.free_names();
    let instances = instantiate_pair(&eq.lhs, &eq.rhs, bound, &fixed);
    let mut failures = Vec::new();
    for inst in instances.values() {
        let (l, r) = (&inst.sides[0], &inst.sides[1]);
        let (lv, rv) = (evaluate(l, m)?, evaluate(r, m)?);
        let reason = if lv.axes != rv.axes {
            let show = |v: &[crate::names::DirectedEdge]| {
                v.iter()
                    .map(|a| a.to_string())
                    .collect::<Vec<_>>()
                    .join(" ")
            };
            Some(format!(
                "free edges differ: [{}] vs [{}]",
                show(&lv.axes),
                show(&rv.axes)
            ))
        } else {
            lv.first_difference(&rv, m.tolerance()).map(|(idx, a, b)| {
                let at: Vec<String> = lv
                    .axes
                    .iter()
                    .zip(&idx)
                    .map(|(e, i)| format!("{e}={i}"))
                    .collect();
                format!("at [{}]: {a} vs {b}", at.join(" "))
            })
        };
        if let Some(reason) = reason {
            let ops = inst
                .ops
                .iter()
                .map(|o| o.to_string())
                .collect::<Vec<_>>()
                .join(", ");
            failures.push(InstanceFailure {
                ops,
                lhs: l.clone(),
                rhs: r.clone(),
                reason,
            });
        }
    }
    let equation = eq.name.clone().unwrap_or_else(|| eq.to_string());
    Ok(InstanceReport {
        equation,
        checked: instances.len(),
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::matrix_algebra;
    use crate::syntax::parse_equation;

    #[test]
    fn associativity_holds_exactly() {
        let m = matrix_algebra::<i64>(2).unwrap();
        let eq = parse_equation("m{+o -p -z} m{+p -x -y} = m{+o -x -p} m{+p -y -z}").unwrap();
        let r = check_equation_instances(&eq, &m, InstanceBound(2)).unwrap();
        assert!(r.passed() && r.checked == 1, "{r}");
    }

    #[test]
    fn a_wrong_unit_is_caught_with_a_witness() {
        let mut m = matrix_algebra::<i64>(2).unwrap();
        m.assign("u", "^", vec![1, 0, 0, 0]).unwrap();
        let eq = parse_equation("m{+o -p -x} u{+p} = id{+o -x}").unwrap();
        let r = check_equation_instances(&eq, &m, InstanceBound(1)).unwrap();
        assert_eq!(r.failures.len(), 1);
        assert!(r.to_string().contains("at [+o="), "{r}");
    }

    #[test]
    fn killing_everything_leaves_one_instance() {
        let m = matrix_algebra::<i64>(2).unwrap();
        let eq = parse_equation("s{+o [-x>A} []A = s{+o [-x>A} []A").unwrap();
        let r = check_equation_instances(&eq, &m, InstanceBound(0)).unwrap();
        assert_eq!(r.checked, 1);
        assert!(r.passed());
        let r = check_equation_instances(&eq, &m, InstanceBound(3)).unwrap();
        assert_eq!(r.checked, 4);
    }

    #[test]
    fn spider_recursion_holds() {
        let m = matrix_algebra::<i64>(2).unwrap();
        let eq = parse_equation("s{+o [-x>A -y} []A = s{+p [-x>A} m{+o -p -y} []A").unwrap();
        let r = check_equation_instances(&eq, &m, InstanceBound(3)).unwrap();
        assert!(r.passed() && r.checked == 4, "{r}");
    }
}

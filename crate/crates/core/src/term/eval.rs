use std::collections::BTreeMap;

use super::Term;
use crate::bao::FiniteBao;
use crate::element::Element;
use crate::error::{Error, Result};
use crate::ops::{ConstName, UnaryOp};

pub type Assignment = BTreeMap<String, Element>;

/// Evaluates `t` in `a` under `env`.
pub fn eval(t: &Term, a: &FiniteBao, env: &Assignment) -> Result<Element> {
    eval_with(t, a, &|v| env.get(v))
}

pub(crate) fn eval_with<'e>(
    t: &Term,
    a: &FiniteBao,
    env: &dyn Fn(&str) -> Option<&'e Element>,
) -> Result<Element> {
    let check_index = |i: usize| {
        if i >= a.dim() {
            Err(Error::IndexOutOfRange {
                index: i,
                bound: a.dim(),
            })
        } else {
            Ok(())
        }
    };
    let rec = |t: &Term| eval_with(t, a, env);
    match t {
        Term::Var(v) => match env(v) {
            Some(x) if x.universe() == a.len() => Ok(x.clone()),
            Some(x) => Err(Error::FrameMismatch {
                expected: a.len(),
                found: x.universe(),
            }),
            None => Err(Error::UnassignedVariable(v.clone())),
        },
        Term::Zero => Ok(a.zero()),
        Term::One => Ok(a.one()),
        Term::Const(c) => {
            for i in c.indices() {
                check_index(i)?;
            }
            a.constant(c)
        }
        Term::Unary(op, t) => {
            for i in op.indices() {
                check_index(i)?;
            }
            let x = rec(t)?;
            a.apply(op, &x)
        }
        Term::Subst(i, j, t) => {
            check_index(*i)?;
            check_index(*j)?;
            let x = rec(t)?;
            if i == j {
                return Ok(x);
            }
            let d = a.constant(&ConstName::Diag(*i, *j))?;
            a.apply(&UnaryOp::Cyl(*i), &(&d & &x))
        }
        Term::CylSet(g, t) => {
            let mut x = rec(t)?;
            for &i in g {
                check_index(i)?;
                x = a.apply(&UnaryOp::Cyl(i), &x)?;
            }
            Ok(x)
        }
        Term::Not(t) => Ok(rec(t)?.complement()),
        Term::Join(l, r) => Ok(&rec(l)? | &rec(r)?),
        Term::Meet(l, r) => Ok(&rec(l)? & &rec(r)?),
        Term::Compose(l, r) => {
            let (x, y) = (rec(l)?, rec(r)?);
            a.compose(&x, &y)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sets::{full_set_algebra, tuple_element};
    use crate::term::parse_term;

    #[test]
    fn diagonal_of_full_set_algebra() {
        let a = full_set_algebra(3, 2, &[]).unwrap();
        let d = eval(&parse_term("d01").unwrap(), &a, &Assignment::new()).unwrap();
        assert_eq!(d.count(), 4);
    }

    #[test]
    fn substitution_kills_off_diagonal_point() {
        let a = full_set_algebra(3, 2, &[]).unwrap();
        let x = tuple_element(&a, &[vec![0, 1, 0]]);
        let env = Assignment::from([("x".to_string(), x)]);
        let y = eval(&parse_term("(s 1 0 x)").unwrap(), &a, &env).unwrap();
        assert!(y.is_zero());
        assert_eq!(
            eval(&parse_term("(s 1 1 x)").unwrap(), &a, &env).unwrap(),
            env["x"]
        );
    }

    #[test]
    fn reports_unassigned_and_out_of_range() {
        let a = full_set_algebra(2, 2, &[]).unwrap();
        let env = Assignment::new();
        assert!(matches!(
            eval(&parse_term("x").unwrap(), &a, &env),
            Err(Error::UnassignedVariable(_))
        ));
        assert!(matches!(
            eval(&parse_term("(c 5 1)").unwrap(), &a, &env),
            Err(Error::IndexOutOfRange { index: 5, bound: 2 })
        ));
    }
}

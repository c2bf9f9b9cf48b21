//! Terms and equations over the operator signatures of [`crate::ops`].
//!
//! The concrete syntax is prefix notation:
//!
//! | form | meaning |
//! |------|---------|
//! | `x`, `v3` | variable |
//! | `0`, `1` | bottom, top |
//! | `d01`, `(d 0 1)` | diagonal `d_01` |
//! | `Id`, `1'` | relation-algebra identity |
//! | `(const R)` | custom constant |
//! | `(c 0 t)`, `(c0 t)` | cylindrifier; likewise `cu`, `cd`, `p i j` |
//! | `(cg 0 2 t)` | `c_(Γ)` for `Γ = {0, 2}`, applied in ascending order |
//! | `(s i j t)` | `c_i (d_ij · t)`: coordinate `i` takes the value of `j`; the identity when `i = j` |
//! | `(s[1,0,2] t)` | substitution along a transformation |
//! | `(conv t)` | converse |
//! | `(- t)` | complement |
//! | `(+ t u ...)`, `(* t u ...)` | join, meet |
//! | `(; t u ...)` | composition |
//! | `(= t u)`, `(<= t u)` | equation, inequation |

mod check;
mod eval;
mod parse;
mod schema;

use std::collections::BTreeSet;
use std::fmt;

pub use check::{check_equation, check_variety, CheckMode, VarietyReport, Verdict};
pub use eval::{eval, Assignment};
pub use parse::{parse_equation, parse_term};
pub use schema::{
    ca_axioms, ca_schema, eta_plus, eta_plus_equation, instantiate_schema, IndexInjection,
    OpSymbol, SchemaTemplate,
};

use crate::ops::{ConstName, UnaryOp};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    Zero,
    One,
    Const(ConstName),
    Unary(UnaryOp, Box<Term>),
    /// `c_i (d_ij · t)`, the identity when `i = j`.
    Subst(usize, usize, Box<Term>),
    /// `c_(Γ)`, indices kept sorted and distinct.
    CylSet(Vec<usize>, Box<Term>),
    Not(Box<Term>),
    Join(Box<Term>, Box<Term>),
    Meet(Box<Term>, Box<Term>),
    Compose(Box<Term>, Box<Term>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EqKind {
    Eq,
    Le,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Equation {
    pub kind: EqKind,
    pub lhs: Term,
    pub rhs: Term,
}

pub fn var(name: &str) -> Term {
    Term::Var(name.to_string())
}

pub fn diag(i: usize, j: usize) -> Term {
    Term::Const(ConstName::Diag(i, j))
}

pub fn id() -> Term {
    Term::Const(ConstName::Id)
}

pub fn cyl(i: usize, t: Term) -> Term {
    Term::Unary(UnaryOp::Cyl(i), Box::new(t))
}

pub fn unary(op: UnaryOp, t: Term) -> Term {
    Term::Unary(op, Box::new(t))
}

pub fn subst(i: usize, j: usize, t: Term) -> Term {
    Term::Subst(i, j, Box::new(t))
}

pub fn cyl_set(indices: impl IntoIterator<Item = usize>, t: Term) -> Term {
    let set: BTreeSet<usize> = indices.into_iter().collect();
    Term::CylSet(set.into_iter().collect(), Box::new(t))
}

pub fn not(t: Term) -> Term {
    Term::Not(Box::new(t))
}

pub fn join(a: Term, b: Term) -> Term {
    Term::Join(Box::new(a), Box::new(b))
}

pub fn meet(a: Term, b: Term) -> Term {
    Term::Meet(Box::new(a), Box::new(b))
}

pub fn compose(a: Term, b: Term) -> Term {
    Term::Compose(Box::new(a), Box::new(b))
}

pub fn converse(t: Term) -> Term {
    Term::Unary(UnaryOp::Converse, Box::new(t))
}

/// Meet of all terms; `1` when empty.
pub fn meet_all(terms: impl IntoIterator<Item = Term>) -> Term {
    terms.into_iter().reduce(meet).unwrap_or(Term::One)
}

/// Join of all terms; `0` when empty.
pub fn join_all(terms: impl IntoIterator<Item = Term>) -> Term {
    terms.into_iter().reduce(join).unwrap_or(Term::Zero)
}

/// Composition of all terms; `1'` when empty.
pub fn compose_all(terms: impl IntoIterator<Item = Term>) -> Term {
    terms.into_iter().reduce(compose).unwrap_or_else(id)
}

impl Term {
    pub fn children(&self) -> Vec<&Term> {
        match self {
            Term::Var(_) | Term::Zero | Term::One | Term::Const(_) => vec![],
            Term::Unary(_, t) | Term::Subst(_, _, t) | Term::CylSet(_, t) | Term::Not(t) => vec![t],
            Term::Join(a, b) | Term::Meet(a, b) | Term::Compose(a, b) => vec![a, b],
        }
    }

    pub fn depth(&self) -> usize {
        1 + self
            .children()
            .into_iter()
            .map(Term::depth)
            .max()
            .unwrap_or(0)
    }

    /// Free variables in order of first occurrence.
    pub fn vars(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut Vec<String>) {
        if let Term::Var(v) = self {
            if !out.contains(v) {
                out.push(v.clone());
            }
        }
        for c in self.children() {
            c.collect_vars(out);
        }
    }

    /// Every dimension index mentioned.
    pub fn indices(&self) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        self.collect_indices(&mut out);
        out
    }

    fn collect_indices(&self, out: &mut BTreeSet<usize>) {
        match self {
            Term::Const(c) => out.extend(c.indices()),
            Term::Unary(op, _) => out.extend(op.indices()),
            Term::Subst(i, j, _) => {
                out.insert(*i);
                out.insert(*j);
            }
            Term::CylSet(g, _) => out.extend(g.iter().copied()),
            _ => {}
        }
        for c in self.children() {
            c.collect_indices(out);
        }
    }

    /// Operation symbols with multiplicity, ignoring indices.
    pub fn op_multiset(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        self.collect_ops(&mut out);
        out.sort_unstable();
        out
    }

    fn collect_ops(&self, out: &mut Vec<&'static str>) {
        out.push(match self {
            Term::Var(_) => "var",
            Term::Zero => "0",
            Term::One => "1",
            Term::Const(ConstName::Diag(..)) => "d",
            Term::Const(ConstName::Id) => "Id",
            Term::Const(ConstName::Custom(_)) => "const",
            Term::Unary(UnaryOp::Cyl(_), _) => "c",
            Term::Unary(UnaryOp::CylUp(_), _) => "cu",
            Term::Unary(UnaryOp::CylDown(_), _) => "cd",
            Term::Unary(UnaryOp::Swap(..), _) => "p",
            Term::Unary(UnaryOp::Subst(_), _) => "s_tau",
            Term::Unary(UnaryOp::Converse, _) => "conv",
            Term::Unary(UnaryOp::Custom(_), _) => "custom",
            Term::Subst(..) => "s",
            Term::CylSet(..) => "cg",
            Term::Not(_) => "-",
            Term::Join(..) => "+",
            Term::Meet(..) => "*",
            Term::Compose(..) => ";",
        });
        for c in self.children() {
            c.collect_ops(out);
        }
    }

    /// Replaces variables by terms.
    pub fn substitute(&self, f: &impl Fn(&str) -> Option<Term>) -> Term {
        let rec = |t: &Term| Box::new(t.substitute(f));
        match self {
            Term::Var(v) => f(v).unwrap_or_else(|| self.clone()),
            Term::Zero | Term::One | Term::Const(_) => self.clone(),
            Term::Unary(op, t) => Term::Unary(op.clone(), rec(t)),
            Term::Subst(i, j, t) => Term::Subst(*i, *j, rec(t)),
            Term::CylSet(g, t) => Term::CylSet(g.clone(), rec(t)),
            Term::Not(t) => Term::Not(rec(t)),
            Term::Join(a, b) => Term::Join(rec(a), rec(b)),
            Term::Meet(a, b) => Term::Meet(rec(a), rec(b)),
            Term::Compose(a, b) => Term::Compose(rec(a), rec(b)),
        }
    }
}

impl Equation {
    pub fn new(lhs: Term, rhs: Term) -> Self {
        Equation {
            kind: EqKind::Eq,
            lhs,
            rhs,
        }
    }

    pub fn le(lhs: Term, rhs: Term) -> Self {
        Equation {
            kind: EqKind::Le,
            lhs,
            rhs,
        }
    }

    pub fn vars(&self) -> Vec<String> {
        let mut v = self.lhs.vars();
        for x in self.rhs.vars() {
            if !v.contains(&x) {
                v.push(x);
            }
        }
        v
    }

    pub fn indices(&self) -> BTreeSet<usize> {
        let mut s = self.lhs.indices();
        s.extend(self.rhs.indices());
        s
    }

    /// Orders the sides of an equation so that syntactic duplicates coincide.
    pub fn canonical(mut self) -> Self {
        if self.kind == EqKind::Eq && self.rhs.to_string() < self.lhs.to_string() {
            std::mem::swap(&mut self.lhs, &mut self.rhs);
        }
        self
    }
}

fn write_indexed(f: &mut fmt::Formatter<'_>, name: &str, idx: &[usize], t: &Term) -> fmt::Result {
    write!(f, "({name}")?;
    for i in idx {
        write!(f, " {i}")?;
    }
    write!(f, " {t})")
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::Zero => write!(f, "0"),
            Term::One => write!(f, "1"),
            Term::Const(ConstName::Diag(i, j)) => write!(f, "(d {i} {j})"),
            Term::Const(ConstName::Id) => write!(f, "Id"),
            Term::Const(ConstName::Custom(s)) => write!(f, "(const {s})"),
            Term::Unary(UnaryOp::Cyl(i), t) => write_indexed(f, "c", &[*i], t),
            Term::Unary(UnaryOp::CylUp(i), t) => write_indexed(f, "cu", &[*i], t),
            Term::Unary(UnaryOp::CylDown(i), t) => write_indexed(f, "cd", &[*i], t),
            Term::Unary(UnaryOp::Swap(i, j), t) => write_indexed(f, "p", &[*i, *j], t),
            Term::Unary(op, t) => write!(f, "({op} {t})"),
            Term::Subst(i, j, t) => write_indexed(f, "s", &[*i, *j], t),
            Term::CylSet(g, t) => write_indexed(f, "cg", g, t),
            Term::Not(t) => write!(f, "(- {t})"),
            Term::Join(a, b) => write!(f, "(+ {a} {b})"),
            Term::Meet(a, b) => write!(f, "(* {a} {b})"),
            Term::Compose(a, b) => write!(f, "(; {a} {b})"),
        }
    }
}

impl fmt::Display for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = match self.kind {
            EqKind::Eq => "=",
            EqKind::Le => "<=",
        };
        write!(f, "({op} {} {})", self.lhs, self.rhs)
    }
}

impl std::str::FromStr for Term {
    type Err = crate::Error;
    fn from_str(s: &str) -> crate::Result<Term> {
        parse_term(s)
    }
}

impl std::str::FromStr for Equation {
    type Err = crate::Error;
    fn from_str(s: &str) -> crate::Result<Equation> {
        parse_equation(s)
    }
}

impl serde::Serialize for Equation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for Equation {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = <String as serde::Deserialize>::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl serde::Serialize for Term {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for Term {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = <String as serde::Deserialize>::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

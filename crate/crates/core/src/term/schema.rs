//! Equation schemas over a finite type `t = (T, δ, ρ, c)` and their
//! instantiation in higher dimensions.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{cyl, diag, join, meet, not, var, Equation, Term};
use crate::error::{Error, Result};
use crate::ops::{ConstName, UnaryOp};

/// An injection between index sets, given by its graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexInjection {
    map: BTreeMap<usize, usize>,
}

impl IndexInjection {
    pub fn new(map: BTreeMap<usize, usize>) -> Result<Self> {
        let image: BTreeSet<_> = map.values().collect();
        if image.len() != map.len() {
            return Err(Error::Parameter("index map is not injective".into()));
        }
        Ok(IndexInjection { map })
    }

    /// The injection `k ↦ images[k]` on `0..images.len()`.
    pub fn from_images(images: &[usize]) -> Result<Self> {
        Self::new(images.iter().copied().enumerate().collect())
    }

    pub fn identity(n: usize) -> Self {
        IndexInjection {
            map: (0..n).map(|i| (i, i)).collect(),
        }
    }

    pub fn get(&self, i: usize) -> Option<usize> {
        self.map.get(&i).copied()
    }

    pub fn domain(&self) -> impl Iterator<Item = usize> + '_ {
        self.map.keys().copied()
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &IndexInjection) -> Result<IndexInjection> {
        let map = other
            .map
            .iter()
            .map(|(&k, &v)| {
                self.get(v).map(|w| (k, w)).ok_or(Error::IndexOutOfRange {
                    index: v,
                    bound: usize::MAX,
                })
            })
            .collect::<Result<_>>()?;
        IndexInjection::new(map)
    }
}

/// Renames every index of `t` along `eta`; variables are unchanged.
pub fn eta_plus(eta: &IndexInjection, t: &Term) -> Result<Term> {
    let m = |i: usize| {
        eta.get(i).ok_or(Error::IndexOutOfRange {
            index: i,
            bound: eta.map.len(),
        })
    };
    let rec = |t: &Term| eta_plus(eta, t).map(Box::new);
    Ok(match t {
        Term::Var(_) | Term::Zero | Term::One => t.clone(),
        Term::Const(c) => {
            for i in c.indices() {
                m(i)?;
            }
            Term::Const(c.reindex(|i| eta.get(i)).expect("indices checked"))
        }
        Term::Unary(op, s) => {
            for i in op.indices() {
                m(i)?;
            }
            let new = op
                .reindex(|i| eta.get(i))
                .ok_or_else(|| Error::Precondition(format!("operator {op} cannot be renamed")))?;
            Term::Unary(new, rec(s)?)
        }
        Term::Subst(i, j, s) => Term::Subst(m(*i)?, m(*j)?, rec(s)?),
        Term::CylSet(g, s) => {
            let mut h = g.iter().map(|&i| m(i)).collect::<Result<Vec<_>>>()?;
            h.sort_unstable();
            Term::CylSet(h, rec(s)?)
        }
        Term::Not(s) => Term::Not(rec(s)?),
        Term::Join(a, b) => Term::Join(rec(a)?, rec(b)?),
        Term::Meet(a, b) => Term::Meet(rec(a)?, rec(b)?),
        Term::Compose(a, b) => Term::Compose(rec(a)?, rec(b)?),
    })
}

pub fn eta_plus_equation(eta: &IndexInjection, e: &Equation) -> Result<Equation> {
    Ok(Equation {
        kind: e.kind,
        lhs: eta_plus(eta, &e.lhs)?,
        rhs: eta_plus(eta, &e.rhs)?,
    })
}

/// An operation symbol `f ∈ T` with index arity `δf` and rank `ρf`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpSymbol {
    pub name: String,
    pub delta: usize,
    pub rank: usize,
}

/// A finite type schema together with equation templates in dimension `m`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemaTemplate {
    pub m: usize,
    pub symbols: Vec<OpSymbol>,
    pub templates: Vec<Equation>,
}

/// Symbol name, index arity and rank of the outermost operation of `t`, if
/// it is a non-Boolean operation.
fn symbol_of(t: &Term) -> Option<(String, usize, usize)> {
    Some(match t {
        Term::Const(ConstName::Diag(..)) => ("d".into(), 2, 0),
        Term::Const(ConstName::Id) => ("Id".into(), 0, 0),
        Term::Const(ConstName::Custom(s)) => (s.clone(), 0, 0),
        Term::Unary(UnaryOp::Cyl(_), _) => ("c".into(), 1, 1),
        Term::Unary(UnaryOp::CylUp(_), _) => ("cu".into(), 1, 1),
        Term::Unary(UnaryOp::CylDown(_), _) => ("cd".into(), 1, 1),
        Term::Unary(UnaryOp::Swap(..), _) => ("p".into(), 2, 1),
        Term::Unary(UnaryOp::Subst(t), _) => ("s_tau".into(), t.len(), 1),
        Term::Unary(UnaryOp::Converse, _) => ("conv".into(), 0, 1),
        Term::Unary(UnaryOp::Custom(s), _) => (s.clone(), 0, 1),
        Term::Subst(..) => ("s".into(), 2, 1),
        Term::CylSet(g, _) => ("c".into(), g.len(), 1),
        Term::Compose(..) => (";".into(), 0, 2),
        _ => return None,
    })
}

impl SchemaTemplate {
    pub fn validate(&self) -> Result<()> {
        match self.symbols.iter().find(|s| s.name == "c") {
            Some(c) if c.delta == 1 && c.rank == 1 => {}
            _ => {
                return Err(Error::Parameter(
                    "the schema needs the symbol c with δc = ρc = 1".into(),
                ))
            }
        }
        for s in &self.symbols {
            if s.delta > self.m {
                return Err(Error::Parameter(format!(
                    "symbol {} has index arity {} > m = {}",
                    s.name, s.delta, self.m
                )));
            }
        }
        for e in &self.templates {
            if let Some(&i) = e.indices().iter().find(|&&i| i >= self.m) {
                return Err(Error::IndexOutOfRange {
                    index: i,
                    bound: self.m,
                });
            }
            for side in [&e.lhs, &e.rhs] {
                self.check_symbols(side)?;
            }
        }
        Ok(())
    }

    fn check_symbols(&self, t: &Term) -> Result<()> {
        if let Some((name, delta, rank)) = symbol_of(t) {
            let ok = self.symbols.iter().any(|s| {
                s.name == name
                    && s.rank == rank
                    && (s.delta == delta || matches!(t, Term::CylSet(..)))
            });
            if !ok {
                return Err(Error::UnknownSymbol(name));
            }
        }
        t.children()
            .into_iter()
            .try_for_each(|c| self.check_symbols(c))
    }
}

/// All injections from `dom` (sorted) into `0..n`, as image lists.
fn injections(dom: usize, n: usize) -> Vec<Vec<usize>> {
    fn go(
        k: usize,
        n: usize,
        cur: &mut Vec<usize>,
        used: &mut Vec<bool>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for v in 0..n {
            if !used[v] {
                used[v] = true;
                cur.push(v);
                go(k, n, cur, used, out);
                cur.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(dom, n, &mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// `Σ_n`: every `ρ⁺e` for a template `e` and an injection `ρ` from the
/// indices of `e` into `n`, deduplicated after ordering equation sides.
pub fn instantiate_schema(s: &SchemaTemplate, n: usize) -> Result<Vec<Equation>> {
    s.validate()?;
    if n < s.m {
        return Err(Error::Parameter(format!(
            "dimension {n} is below the schema dimension {}",
            s.m
        )));
    }
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for e in &s.templates {
        let support: Vec<usize> = e.indices().into_iter().collect();
        for images in injections(support.len(), n) {
            let rho = IndexInjection::new(support.iter().copied().zip(images).collect())?;
            let inst = eta_plus_equation(&rho, e)?.canonical();
            if seen.insert(inst.to_string()) {
                out.push(inst);
            }
        }
    }
    Ok(out)
}

fn cylindric_symbols() -> Vec<OpSymbol> {
    vec![
        OpSymbol {
            name: "c".into(),
            delta: 1,
            rank: 1,
        },
        OpSymbol {
            name: "d".into(),
            delta: 2,
            rank: 0,
        },
    ]
}

/// Templates of the cylindric axioms, in dimension 3.
pub fn ca_schema() -> SchemaTemplate {
    let x = || var("x");
    let y = || var("y");
    let templates = vec![
        Equation::new(cyl(0, Term::Zero), Term::Zero),
        Equation::new(join(x(), cyl(0, x())), cyl(0, x())),
        Equation::new(
            cyl(0, meet(x(), cyl(0, y()))),
            meet(cyl(0, x()), cyl(0, y())),
        ),
        Equation::new(cyl(0, cyl(1, x())), cyl(1, cyl(0, x()))),
        Equation::new(diag(0, 0), Term::One),
        Equation::new(diag(0, 1), cyl(2, meet(diag(0, 2), diag(2, 1)))),
        Equation::new(
            meet(
                cyl(0, meet(diag(0, 1), x())),
                cyl(0, meet(diag(0, 1), not(x()))),
            ),
            Term::Zero,
        ),
    ];
    SchemaTemplate {
        m: 3,
        symbols: cylindric_symbols(),
        templates,
    }
}

/// The cylindric axioms in dimension `n`, written out index by index.
pub fn ca_axioms(n: usize) -> Vec<Equation> {
    let x = || var("x");
    let y = || var("y");
    let mut out = Vec::new();
    for i in 0..n {
        out.push(Equation::new(cyl(i, Term::Zero), Term::Zero));
    }
    for i in 0..n {
        out.push(Equation::new(join(x(), cyl(i, x())), cyl(i, x())));
    }
    for i in 0..n {
        out.push(Equation::new(
            cyl(i, meet(x(), cyl(i, y()))),
            meet(cyl(i, x()), cyl(i, y())),
        ));
    }
    for i in 0..n {
        for j in i + 1..n {
            out.push(Equation::new(cyl(i, cyl(j, x())), cyl(j, cyl(i, x()))));
        }
    }
    for i in 0..n {
        out.push(Equation::new(diag(i, i), Term::One));
    }
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if i != j && k != i && k != j {
                    out.push(Equation::new(
                        diag(i, j),
                        cyl(k, meet(diag(i, k), diag(k, j))),
                    ));
                }
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            if i != j {
                out.push(Equation::new(
                    meet(
                        cyl(i, meet(diag(i, j), x())),
                        cyl(i, meet(diag(i, j), not(x()))),
                    ),
                    Term::Zero,
                ));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::parse_term;

    #[test]
    fn eta_plus_renames_indices() {
        let eta = IndexInjection::from_images(&[0, 2, 3]).unwrap();
        let t = parse_term("(c 1 (d 1 2))").unwrap();
        assert_eq!(eta_plus(&eta, &t).unwrap().to_string(), "(c 2 (d 2 3))");
        assert_eq!(eta_plus(&IndexInjection::identity(3), &t).unwrap(), t);
        assert!(eta_plus(&IndexInjection::identity(2), &t).is_err());
    }

    #[test]
    fn commutativity_has_three_instances() {
        let s = SchemaTemplate {
            templates: vec![ca_schema().templates[3].clone()],
            ..ca_schema()
        };
        assert_eq!(instantiate_schema(&s, 3).unwrap().len(), 3);
        assert_eq!(instantiate_schema(&s, 4).unwrap().len(), 6);
        assert!(instantiate_schema(&s, 2).is_err());
    }

    #[test]
    fn validation() {
        let mut s = ca_schema();
        s.symbols[0].delta = 2;
        assert!(s.validate().is_err());
        let mut s = ca_schema();
        s.templates
            .push(Equation::new(parse_term("(p 0 1 x)").unwrap(), var("x")));
        assert!(matches!(s.validate(), Err(Error::UnknownSymbol(_))));
        let mut s = ca_schema();
        s.templates
            .push(Equation::new(parse_term("(c 3 x)").unwrap(), var("x")));
        assert!(s.validate().is_err());
    }

    #[test]
    fn injection_count() {
        assert_eq!(injections(2, 4).len(), 12);
        assert_eq!(injections(0, 4), vec![Vec::<usize>::new()]);
    }
}

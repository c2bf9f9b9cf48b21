//! Quasi-projective relation algebras and the cylindric algebras `B_n`
//! defined inside them by terms.
//!
//! Finite representable QRAs are degenerate: a pairing of `U` needs
//! `|U × U| ≤ |U|`. Everything here therefore runs on small abstract
//! instances, mostly algebras where `1 = 1′` on each component, and the
//! verdicts are reported rather than assumed.

use std::collections::{BTreeMap, HashSet};

use serde::Serialize;

use crate::atom::AtomId;
use crate::bao::{complex_algebra, FiniteBao};
use crate::dims::{ca_frame_correspondents, CorrespondentReport};
use crate::element::Element;
use crate::error::{Error, Result};
use crate::frame::{AtomStructure, Consistency, Relation};
use crate::ops::{ConstName, Signature, UnaryOp};
use crate::term::{compose, converse, eval, id, meet, meet_all, var, Assignment, Term};

/// Largest algebra whose elements are enumerated.
pub const ELEMENT_ATOM_CAP: usize = 16;

/// How the second half of the first quasi-projection axiom is read.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AxiomReading {
    /// `q̆;q ≤ 1′`.
    #[default]
    Standard,
    /// `q;q ≤ 1`, as displayed; every `q` satisfies it.
    Literal,
}

/// How `ξ_i`, `d_ij` and `dom`/`ran` are read.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TermReading {
    /// `ξ_i = π_i;π̆_i`, `d_ij = 1;dom(π_i·π_j)`, `dom x = 1′·(x;x̆)`.
    #[default]
    Converse,
    /// `ξ_i = π_i;π_i`, `d_ij = 1;(π_i·π_j)`, `dom x = 1′;(x;x̆)`.
    Verbatim,
}

/// Result of checking the quasi-projection axioms.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QuasiReport {
    pub axioms: Vec<(String, bool)>,
}

impl QuasiReport {
    pub fn holds(&self) -> bool {
        self.axioms.iter().all(|(_, ok)| *ok)
    }

    pub fn first_failure(&self) -> Option<&str> {
        self.axioms
            .iter()
            .find(|(_, ok)| !ok)
            .map(|(name, _)| name.as_str())
    }
}

fn require_ra(b: &FiniteBao) -> Result<()> {
    let sig = b.signature();
    if !sig.composition
        || !sig.unary.contains(&UnaryOp::Converse)
        || !sig.constants.contains(&ConstName::Id)
    {
        return Err(Error::Parameter(
            "a relation algebra signature is required".into(),
        ));
    }
    Ok(())
}

pub fn check_quasiprojections(
    b: &FiniteBao,
    p: &Element,
    q: &Element,
    reading: AxiomReading,
) -> Result<QuasiReport> {
    require_ra(b)?;
    let one_prime = b.constant(&ConstName::Id)?;
    let pp = b.compose(&b.converse(p)?, p)?;
    let (name, q_ok) = match reading {
        AxiomReading::Standard => ("q˘;q ≤ 1'", b.compose(&b.converse(q)?, q)?.le(&one_prime)),
        AxiomReading::Literal => ("q;q ≤ 1", true),
    };
    Ok(QuasiReport {
        axioms: vec![
            ("p˘;p ≤ 1'".into(), pp.le(&one_prime)),
            (name.into(), q_ok),
            ("p˘;q = 1".into(), b.compose(&b.converse(p)?, q)?.is_one()),
        ],
    })
}

/// The first pair `(p, q)` of quasi-projections in element order, by
/// exhaustive search.
pub fn find_quasiprojections(
    b: &FiniteBao,
    reading: AxiomReading,
) -> Result<Option<(Element, Element)>> {
    require_ra(b)?;
    if b.len() > ELEMENT_ATOM_CAP / 2 {
        return Err(Error::CapExceeded(format!(
            "pair search over {} atoms",
            b.len()
        )));
    }
    let one_prime = b.constant(&ConstName::Id)?;
    let elements: Vec<Element> = b.elements()?.collect();
    let mut ps = Vec::new();
    let mut qs = Vec::new();
    for x in &elements {
        let xc = b.converse(x)?;
        if b.compose(&xc, x)?.le(&one_prime) {
            ps.push((x.clone(), xc));
        }
        if reading == AxiomReading::Literal || b.compose(&b.converse(x)?, x)?.le(&one_prime) {
            qs.push(x.clone());
        }
    }
    for (p, pc) in &ps {
        for q in &qs {
            if b.compose(pc, q)?.is_one() {
                return Ok(Some((p.clone(), q.clone())));
            }
        }
    }
    Ok(None)
}

/// An RA with quasi-projections.
#[derive(Clone, Debug)]
pub struct QraContext {
    pub algebra: FiniteBao,
    pub p: Element,
    pub q: Element,
    pub axioms: AxiomReading,
    pub terms: TermReading,
}

impl QraContext {
    pub fn new(algebra: FiniteBao, p: Element, q: Element) -> Result<Self> {
        Self::with_readings(
            algebra,
            p,
            q,
            AxiomReading::default(),
            TermReading::default(),
        )
    }

    pub fn with_readings(
        algebra: FiniteBao,
        p: Element,
        q: Element,
        axioms: AxiomReading,
        terms: TermReading,
    ) -> Result<Self> {
        let report = check_quasiprojections(&algebra, &p, &q, axioms)?;
        if let Some(failed) = report.first_failure() {
            return Err(Error::Precondition(format!(
                "not quasi-projections: {failed} fails"
            )));
        }
        Ok(QraContext {
            algebra,
            p,
            q,
            axioms,
            terms,
        })
    }

    fn env(&self, x: Option<&Element>) -> Assignment {
        let mut env = Assignment::from([
            ("p".to_string(), self.p.clone()),
            ("q".to_string(), self.q.clone()),
        ]);
        if let Some(x) = x {
            env.insert("x".into(), x.clone());
        }
        env
    }

    /// Evaluates a term in `p`, `q` and optionally `x`.
    pub fn eval(&self, t: &Term, x: Option<&Element>) -> Result<Element> {
        eval(t, &self.algebra, &self.env(x))
    }
}

/// `1′` for `k = 0`, else `x;…;x`.
pub fn power(x: Term, k: usize) -> Term {
    (0..k).fold(id(), |acc, _| compose(acc, x.clone()))
}

pub fn dom(x: Term, reading: TermReading) -> Term {
    let xx = compose(x.clone(), converse(x));
    match reading {
        TermReading::Converse => meet(id(), xx),
        TermReading::Verbatim => compose(id(), xx),
    }
}

pub fn ran(x: Term, reading: TermReading) -> Term {
    let xx = compose(converse(x.clone()), x);
    match reading {
        TermReading::Converse => meet(id(), xx),
        TermReading::Verbatim => compose(id(), xx),
    }
}

/// `suc(x) = 1;(p̆;x;q̆)`.
pub fn suc(x: Term) -> Term {
    compose(
        Term::One,
        compose(compose(converse(var("p")), x), converse(var("q"))),
    )
}

/// `pred(x) = p̆;ran(x);q`.
pub fn pred(x: Term, reading: TermReading) -> Term {
    compose(compose(converse(var("p")), ran(x, reading)), var("q"))
}

/// The terms defining `B_n` in a QRA, in the free constants `p`, `q` and
/// the variable `x`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QraTerms {
    pub n: usize,
    pub epsilon: Term,
    pub pi: Vec<Term>,
    pub xi: Vec<Term>,
    pub t_i: Vec<Term>,
    pub t: Term,
    /// `c_i^(n) x = x;t_i`.
    pub cyl: Vec<Term>,
    pub diag: Vec<Vec<Term>>,
    pub one: Term,
}

pub fn qra_terms(n: usize, reading: TermReading) -> Result<QraTerms> {
    if n < 2 {
        return Err(Error::Parameter(format!("n = {n} below 2")));
    }
    let p = var("p");
    let q = var("q");
    let epsilon = dom(power(q.clone(), n - 1), reading);
    let pi: Vec<Term> = (0..n)
        .map(|i| {
            if i + 1 < n {
                compose(compose(epsilon.clone(), power(q.clone(), i)), p.clone())
            } else {
                power(q.clone(), n - 1)
            }
        })
        .collect();
    let xi: Vec<Term> = pi
        .iter()
        .map(|t| match reading {
            TermReading::Converse => compose(t.clone(), converse(t.clone())),
            TermReading::Verbatim => compose(t.clone(), t.clone()),
        })
        .collect();
    let t_i: Vec<Term> = (0..n)
        .map(|i| meet_all((0..n).filter(|&j| j != i).map(|j| xi[j].clone())))
        .collect();
    let t = meet_all(xi.iter().cloned());
    let cyl = t_i.iter().map(|ti| compose(var("x"), ti.clone())).collect();
    let diag = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let both = meet(pi[i].clone(), pi[j].clone());
                    match reading {
                        TermReading::Converse => compose(Term::One, dom(both, reading)),
                        TermReading::Verbatim => compose(Term::One, both),
                    }
                })
                .collect()
        })
        .collect();
    let one = compose(Term::One, epsilon.clone());
    Ok(QraTerms {
        n,
        epsilon,
        pi,
        xi,
        t_i,
        t,
        cyl,
        diag,
        one,
    })
}

impl QraTerms {
    /// Every term with a printable name.
    pub fn named(&self, reading: TermReading) -> Vec<(String, Term)> {
        let n = self.n;
        let mut out = vec![(format!("eps^{n}"), self.epsilon.clone())];
        out.extend(
            self.pi
                .iter()
                .enumerate()
                .map(|(i, t)| (format!("pi_{i}^{n}"), t.clone())),
        );
        out.extend(
            self.xi
                .iter()
                .enumerate()
                .map(|(i, t)| (format!("xi_{i}^{n}"), t.clone())),
        );
        out.extend(
            self.t_i
                .iter()
                .enumerate()
                .map(|(i, t)| (format!("t_{i}^{n}"), t.clone())),
        );
        out.push((format!("t^{n}"), self.t.clone()));
        out.extend(
            self.cyl
                .iter()
                .enumerate()
                .map(|(i, t)| (format!("c_{i}^{n}"), t.clone())),
        );
        for (i, row) in self.diag.iter().enumerate() {
            out.extend(
                row.iter()
                    .enumerate()
                    .map(|(j, t)| (format!("d_{i}{j}^{n}"), t.clone())),
            );
        }
        out.push((format!("1^{n}"), self.one.clone()));
        out.push(("dom".into(), dom(var("x"), reading)));
        out.push(("ran".into(), ran(var("x"), reading)));
        out.push(("suc".into(), suc(var("x"))));
        out.push(("pred".into(), pred(var("x"), reading)));
        out
    }
}

/// `B_n` with its closure verdicts.
#[derive(Clone, Debug, Serialize)]
pub struct BnReport {
    pub n: usize,
    #[serde(skip)]
    pub elements: Vec<Element>,
    #[serde(skip)]
    pub unit: Element,
    pub closure: Vec<(String, bool)>,
    /// `B_n` as a complex algebra, when it is a Boolean algebra under `1^(n)`.
    #[serde(skip)]
    pub algebra: Option<FiniteBao>,
    /// The cylindric axioms on `B_n`.
    pub ca: Option<CorrespondentReport>,
    /// `suc(pred x) = x = pred(suc x)` for `x ∈ B_n` with `c_0 x = x`.
    pub suc_pred: bool,
}

impl BnReport {
    pub fn closed(&self) -> bool {
        self.closure.iter().all(|(_, ok)| *ok)
    }

    pub fn size(&self) -> usize {
        self.elements.len()
    }
}

pub fn build_bn(ctx: &QraContext, n: usize) -> Result<BnReport> {
    let b = &ctx.algebra;
    if b.len() > ELEMENT_ATOM_CAP {
        return Err(Error::CapExceeded(format!(
            "{} atoms above {ELEMENT_ATOM_CAP}",
            b.len()
        )));
    }
    let terms = qra_terms(n, ctx.terms)?;
    let t = ctx.eval(&terms.t, None)?;
    let unit = ctx.eval(&terms.one, None)?;
    let t_i = terms
        .t_i
        .iter()
        .map(|x| ctx.eval(x, None))
        .collect::<Result<Vec<_>>>()?;
    let diag = terms
        .diag
        .iter()
        .map(|row| {
            row.iter()
                .map(|d| ctx.eval(d, None))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let one = b.one();
    let mut elements = Vec::new();
    for x in b.elements()? {
        if b.compose(&b.compose(&one, &x)?, &t)? == x {
            elements.push(x);
        }
    }
    let members: HashSet<&Element> = elements.iter().collect();
    let cyl = |i: usize, x: &Element| b.compose(x, &t_i[i]);
    let mut closure = vec![
        ("0 in B_n".to_string(), members.contains(&b.zero())),
        ("1^(n) in B_n".to_string(), members.contains(&unit)),
        (
            "B_n below 1^(n)".to_string(),
            elements.iter().all(|x| x.le(&unit)),
        ),
    ];
    let mut joins = true;
    let mut complements = true;
    for x in &elements {
        complements &= members.contains(&unit.minus(x));
        for y in &elements {
            joins &= members.contains(&(x | y));
        }
    }
    closure.push(("joins".into(), joins));
    closure.push(("relative complements".into(), complements));
    for i in 0..n {
        let mut ok = true;
        for x in &elements {
            ok &= members.contains(&cyl(i, x)?);
        }
        closure.push((format!("c_{i}^(n)"), ok));
    }
    for (i, row) in diag.iter().enumerate() {
        for (j, d) in row.iter().enumerate() {
            closure.push((format!("d_{i}{j}^(n)"), members.contains(d)));
        }
    }
    let closed = closure.iter().all(|(_, ok)| *ok);
    let algebra = if closed {
        Some(bn_algebra(b, &elements, &unit, n, &t_i, &diag)?)
    } else {
        None
    };
    let ca = algebra
        .as_ref()
        .map(|a| ca_frame_correspondents(a.frame(), n))
        .transpose()?;
    let mut suc_pred = true;
    let suc_t = suc(var("x"));
    let pred_t = pred(var("x"), ctx.terms);
    for x in &elements {
        if cyl(0, x)? != *x {
            continue;
        }
        let up = ctx.eval(&suc_t, Some(x))?;
        let down = ctx.eval(&pred_t, Some(x))?;
        suc_pred &= ctx.eval(&pred_t, Some(&up))? == *x && ctx.eval(&suc_t, Some(&down))? == *x;
    }
    Ok(BnReport {
        n,
        elements,
        unit,
        closure,
        algebra,
        ca,
        suc_pred,
    })
}

/// The complex algebra of the atoms of `B_n` with `c_i^(n)` and `d_ij^(n)`.
fn bn_algebra(
    b: &FiniteBao,
    elements: &[Element],
    unit: &Element,
    n: usize,
    t_i: &[Element],
    diag: &[Vec<Element>],
) -> Result<FiniteBao> {
    let atoms: Vec<&Element> = elements
        .iter()
        .filter(|x| !x.is_zero() && elements.iter().all(|y| y.is_zero() || !y.le(x) || y == *x))
        .collect();
    let k = atoms.len();
    let below = |x: &Element| (0..k).filter(|&a| atoms[a].le(x)).collect::<Vec<_>>();
    let mut builder = AtomStructure::builder((0..k).map(AtomId::Block).collect(), n);
    for (i, ti) in t_i.iter().enumerate() {
        let images = atoms
            .iter()
            .map(|a| Ok(below(&b.compose(a, ti)?)))
            .collect::<Result<Vec<_>>>()?;
        builder = builder.unary(UnaryOp::Cyl(i), Relation::from_images(images).normalized());
    }
    for (i, row) in diag.iter().enumerate() {
        for (j, d) in row.iter().enumerate() {
            builder = builder.constant(ConstName::Diag(i, j), Element::from_atoms(k, below(d)));
        }
    }
    let covered = atoms.iter().fold(b.zero(), |acc, a| &acc | *a);
    if covered != *unit {
        return Err(Error::Precondition(
            "atoms of B_n do not cover 1^(n)".into(),
        ));
    }
    Ok(complex_algebra(builder.build()?))
}

/// The RA with `k` atoms, each its own converse and `1 = 1′`.
pub fn discrete_ra(k: usize) -> Result<FiniteBao> {
    if k == 0 {
        return Err(Error::Parameter("at least one atom".into()));
    }
    let identity: Vec<usize> = (0..k).collect();
    let comp = Consistency::from_predicate(k, |a, b, c| a == b && b == c);
    let frame = AtomStructure::builder((0..k).map(AtomId::Index).collect(), 0)
        .unary(UnaryOp::Converse, Relation::from_function(&identity))
        .constant(ConstName::Id, Element::one(k))
        .composition(comp)
        .declare(Signature::relational())
        .build()?;
    Ok(complex_algebra(frame))
}

/// `discrete_ra(k)` with `p = q = 1′`.
pub fn discrete_qra(k: usize) -> Result<QraContext> {
    let b = discrete_ra(k)?;
    let id = b.one();
    QraContext::new(b, id.clone(), id)
}

/// The two-element QRA.
pub fn trivial_qra() -> QraContext {
    discrete_qra(1).expect("one atom")
}

/// Named term values in a context, for display.
pub fn evaluate_named(ctx: &QraContext, n: usize) -> Result<BTreeMap<String, Vec<usize>>> {
    let terms = qra_terms(n, ctx.terms)?;
    let mut out = BTreeMap::new();
    for (name, t) in terms.named(ctx.terms) {
        if t.vars().iter().all(|v| v == "p" || v == "q") {
            out.insert(name, ctx.eval(&t, None)?.as_vec());
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hh::hh_algebra;

    #[test]
    fn trivial_axioms() {
        let ctx = trivial_qra();
        let r =
            check_quasiprojections(&ctx.algebra, &ctx.p, &ctx.q, AxiomReading::Standard).unwrap();
        assert!(r.holds());
    }

    #[test]
    fn unit_is_not_a_projection() {
        let b = hh_algebra(3, 1, 3).unwrap();
        let r = check_quasiprojections(&b, &b.one(), &b.one(), AxiomReading::Standard).unwrap();
        assert_eq!(r.first_failure(), Some("p˘;p ≤ 1'"));
        assert!(QraContext::new(b.clone(), b.one(), b.one()).is_err());
    }

    #[test]
    fn literal_reading_ignores_q() {
        let b = discrete_ra(2).unwrap();
        let x = b.one();
        assert!(check_quasiprojections(&b, &x, &x, AxiomReading::Literal)
            .unwrap()
            .holds());
        assert!(check_quasiprojections(&b, &x, &x, AxiomReading::Standard)
            .unwrap()
            .holds());
    }

    #[test]
    fn hh_three_has_no_quasiprojections() {
        let b = hh_algebra(3, 1, 3).unwrap();
        assert_eq!(
            find_quasiprojections(&b, AxiomReading::Standard).unwrap(),
            None
        );
    }

    #[test]
    fn discrete_algebras_have_them() {
        for k in 1..4 {
            let b = discrete_ra(k).unwrap();
            let (p, q) = find_quasiprojections(&b, AxiomReading::Standard)
                .unwrap()
                .unwrap();
            assert!(p.is_one() && q.is_one());
        }
    }

    #[test]
    fn powers_unfold() {
        let x = var("x");
        assert_eq!(power(x.clone(), 0), id());
        assert_eq!(power(x.clone(), 2), compose(compose(id(), x.clone()), x));
    }

    #[test]
    fn epsilon_two_verbatim() {
        let terms = qra_terms(2, TermReading::Verbatim).unwrap();
        let q = var("q");
        let q1 = compose(id(), q);
        assert_eq!(
            terms.epsilon,
            compose(id(), compose(q1.clone(), converse(q1)))
        );
        assert!(qra_terms(1, TermReading::Converse).is_err());
    }

    #[test]
    fn terms_are_well_formed() {
        for n in 2..6 {
            for reading in [TermReading::Converse, TermReading::Verbatim] {
                let terms = qra_terms(n, reading).unwrap();
                let named = terms.named(reading);
                assert_eq!(named.len(), 1 + 4 * n + 1 + n * n + 1 + 4);
                for (_, t) in &named {
                    assert!(t
                        .vars()
                        .iter()
                        .all(|v| ["p", "q", "x"].contains(&v.as_str())));
                    assert!(t.indices().is_empty());
                }
            }
        }
    }

    #[test]
    fn trivial_bn_collapses() {
        let ctx = trivial_qra();
        for (name, value) in evaluate_named(&ctx, 3).unwrap() {
            assert_eq!(value, vec![0], "{name}");
        }
        let r = build_bn(&ctx, 3).unwrap();
        assert!(r.closed());
        assert_eq!(r.size(), 2);
        assert!(r.ca.as_ref().unwrap().holds());
        assert!(r.suc_pred);
        let a = r.algebra.unwrap();
        assert!(a.cyl(1, &a.zero()).unwrap().is_zero());
    }

    #[test]
    fn discrete_bn_closed_under_both_readings() {
        for k in 1..4 {
            for reading in [TermReading::Converse, TermReading::Verbatim] {
                let base = discrete_qra(k).unwrap();
                let ctx = QraContext::with_readings(
                    base.algebra,
                    base.p,
                    base.q,
                    AxiomReading::Standard,
                    reading,
                )
                .unwrap();
                let r = build_bn(&ctx, 3).unwrap();
                assert!(r.closed(), "{:?}", r.closure);
                assert_eq!(r.size(), 1 << k);
                assert!(r.ca.unwrap().holds());
                assert!(r.suc_pred);
            }
        }
    }
}

//! Dimension sets, neat reducts, index reducts, relativizations, relation
//! algebra reducts and the frame conditions of the cylindric axioms.

use std::collections::BTreeSet;

use petgraph::unionfind::UnionFind;
use serde::Serialize;

use crate::atom::AtomId;
use crate::bao::{complex_algebra, FiniteBao};
use crate::element::Element;
use crate::error::{Error, Result};
use crate::frame::{AtomStructure, Consistency, Relation};
use crate::ops::{ConstName, Signature, UnaryOp};
use crate::term::{cyl, diag, eval, meet, subst, var, Assignment, Term};

/// `Δx = {i : c_i x ≠ x}` over the cylindrifiers of the signature.
pub fn dimension_set(a: &FiniteBao, x: &Element) -> Result<BTreeSet<usize>> {
    let mut out = BTreeSet::new();
    for (op, rel) in a.frame().unary_ops() {
        if let UnaryOp::Cyl(i) = op {
            if x.universe() != a.len() {
                return Err(Error::FrameMismatch {
                    expected: a.len(),
                    found: x.universe(),
                });
            }
            if &rel.apply(x) != x {
                out.insert(*i);
            }
        }
    }
    Ok(out)
}

/// A neat reduct together with the quotient map on atoms.
#[derive(Clone, Debug)]
pub struct NeatReduct {
    pub algebra: FiniteBao,
    /// Original atom → atom of the reduct.
    pub atom_map: Vec<usize>,
}

impl NeatReduct {
    /// The element of the original algebra corresponding to atom `k` of the reduct.
    pub fn block(&self, k: usize) -> Element {
        Element::from_atoms(
            self.atom_map.len(),
            (0..self.atom_map.len()).filter(|&a| self.atom_map[a] == k),
        )
    }
}

/// Joint classes of the given equivalence relations: `(class of each atom,
/// member lists)`, classes numbered by least member.
pub(crate) fn joint_classes(n: usize, rels: &[&Relation]) -> (Vec<u32>, Vec<Vec<usize>>) {
    let mut uf = UnionFind::<u32>::new(n);
    for rel in rels {
        match rel {
            Relation::Equivalence { members, .. } => {
                for c in 0..members.rows() {
                    let row = members.row(c);
                    for w in row.windows(2) {
                        uf.union(w[0], w[1]);
                    }
                }
            }
            Relation::Pairs(_) => {
                for (a, b) in rel.pairs() {
                    uf.union(a as u32, b as u32);
                }
            }
        }
    }
    let labels = uf.into_labeling();
    let mut id = vec![u32::MAX; n];
    let mut class = vec![0u32; n];
    let mut members: Vec<Vec<usize>> = Vec::new();
    for a in 0..n {
        let r = labels[a] as usize;
        if id[r] == u32::MAX {
            id[r] = members.len() as u32;
            members.push(Vec::new());
        }
        class[a] = id[r];
        members[id[r] as usize].push(a);
    }
    (class, members)
}

/// `Nr_I A`: the elements fixed by every `c_i` with `i ∉ I`, with operators
/// reindexed along the order isomorphism `I → |I|`.
pub fn neat_reduct(a: &FiniteBao, keep: &[usize]) -> Result<NeatReduct> {
    let dim = a.dim();
    let mut keep: Vec<usize> = keep.to_vec();
    keep.sort_unstable();
    keep.dedup();
    if let Some(&i) = keep.iter().find(|&&i| i >= dim) {
        return Err(Error::IndexOutOfRange {
            index: i,
            bound: dim,
        });
    }
    let mut dropped = Vec::new();
    for i in (0..dim).filter(|i| !keep.contains(i)) {
        let Ok(rel) = a.relation(&UnaryOp::Cyl(i)) else {
            continue;
        };
        if rel.equivalence_classes().is_none() {
            return Err(Error::Precondition(format!(
                "T_{i} is not an equivalence relation"
            )));
        }
        dropped.push(rel);
    }
    let (class, members) = joint_classes(a.len(), &dropped);
    let pos = |i: usize| keep.iter().position(|&k| k == i);
    let ids = (0..members.len()).map(AtomId::Block).collect();
    let frame = a.induced(
        &class,
        &members,
        ids,
        keep.len(),
        |op| op.reindex(pos),
        |c| c.reindex(pos),
    )?;
    Ok(NeatReduct {
        algebra: complex_algebra(frame),
        atom_map: class.into_iter().map(|c| c as usize).collect(),
    })
}

/// `Rd^ρ A` for an injection `ρ: α → β` given by its images: the operator at
/// index `i` is the old one at `ρ(i)`.
pub fn reduct_rho(a: &FiniteBao, rho: &[usize]) -> Result<FiniteBao> {
    let dim = a.dim();
    if let Some(&v) = rho.iter().find(|&&v| v >= dim) {
        return Err(Error::IndexOutOfRange {
            index: v,
            bound: dim,
        });
    }
    let distinct: BTreeSet<_> = rho.iter().collect();
    if distinct.len() != rho.len() {
        return Err(Error::Parameter(format!("{rho:?} is not injective")));
    }
    let inv = |i: usize| rho.iter().position(|&v| v == i);
    let frame =
        a.frame()
            .map_signature(rho.len(), |op| op.reindex(inv), |c| c.reindex(inv), true)?;
    Ok(complex_algebra(frame))
}

/// `Rl_x A`: atoms below `x`, operators and constants cut down by `x`.
pub fn relativize(a: &FiniteBao, x: &Element) -> Result<FiniteBao> {
    if x.universe() != a.len() {
        return Err(Error::FrameMismatch {
            expected: a.len(),
            found: x.universe(),
        });
    }
    if x.is_zero() {
        return Err(Error::Precondition("cannot relativize to 0".into()));
    }
    let keep = x.as_vec();
    let mut pos = vec![usize::MAX; a.len()];
    for (k, &atom) in keep.iter().enumerate() {
        pos[atom] = k;
    }
    let k = keep.len();
    let f = a.frame();
    let mut b = AtomStructure::builder(
        keep.iter().map(|&i| f.atoms()[i].clone()).collect(),
        f.dim(),
    );
    for (op, rel) in f.unary_ops() {
        let pairs = rel
            .pairs()
            .filter(|&(p, q)| x.contains(p) && x.contains(q))
            .map(|(p, q)| (pos[p], pos[q]));
        let rel = Relation::from_pairs(k, pairs);
        if *op == UnaryOp::Converse && rel.as_function().is_none() {
            return Err(Error::Precondition("x is not closed under converse".into()));
        }
        b = b.unary(op.clone(), rel.normalized());
    }
    for (c, e) in f.constants() {
        b = b.constant(
            c.clone(),
            Element::from_atoms(k, e.atoms().filter(|&i| x.contains(i)).map(|i| pos[i])),
        );
    }
    if let Some(comp) = f.composition() {
        let triples = comp
            .consistent_triples()
            .filter(|&(p, q, r)| x.contains(p) && x.contains(q) && x.contains(r))
            .map(|(p, q, r)| (pos[p], pos[q], pos[r]));
        b = b.composition(Consistency::from_consistent(k, triples));
    }
    Ok(complex_algebra(b.build()?))
}

/// Coordinates used to read a relation algebra off a cylindric algebra:
/// relations live on `(u, v)` and `w` is the spare coordinate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RaCoords {
    pub u: usize,
    pub v: usize,
    pub w: usize,
}

impl RaCoords {
    /// `(n-2, n-1, 0)`, so that `1' = d_{n-2,n-1}`.
    pub fn standard(n: usize) -> Self {
        RaCoords {
            u: n - 2,
            v: n - 1,
            w: 0,
        }
    }

    pub fn composition_term(&self) -> Term {
        let RaCoords { u, v, w } = *self;
        cyl(w, meet(subst(v, w, var("x")), subst(u, w, var("y"))))
    }

    pub fn converse_term(&self) -> Term {
        let RaCoords { u, v, w } = *self;
        subst(w, u, subst(u, v, subst(v, w, var("x"))))
    }

    pub fn identity_term(&self) -> Term {
        diag(self.u, self.v)
    }
}

/// A relation algebra reduct.
#[derive(Clone, Debug, Serialize)]
pub struct RaReduct {
    #[serde(skip)]
    pub algebra: FiniteBao,
    /// Atom `k` of the reduct as an element of the cylindric algebra.
    #[serde(skip)]
    pub blocks: Vec<Element>,
    pub coords: RaCoords,
    pub atoms: usize,
    /// Associativity of `;` over all atom triples, when requested.
    pub associative: Option<bool>,
}

/// `Ra A`: the elements of `Nr_{u,v} A` with `;`, converse and `1'` given by
/// cylindric terms.
pub fn ra_reduct(a: &FiniteBao, coords: RaCoords, check_associativity: bool) -> Result<RaReduct> {
    let n = a.dim();
    if n < 3 {
        return Err(Error::Parameter(format!(
            "relation algebra reducts need dimension at least 3, found {n}"
        )));
    }
    let RaCoords { u, v, w } = coords;
    if [u, v, w].iter().any(|&i| i >= n) || u == v || u == w || v == w {
        return Err(Error::Parameter(format!(
            "coordinates {coords:?} must be distinct and below {n}"
        )));
    }
    let nr = neat_reduct(a, &[u, v])?;
    let k = nr.algebra.len();
    let blocks: Vec<Element> = (0..k).map(|b| nr.block(b)).collect();
    let to_blocks = |x: &Element, what: &str| -> Result<Vec<usize>> {
        let mut out: Vec<usize> = x.atoms().map(|t| nr.atom_map[t]).collect();
        out.sort_unstable();
        out.dedup();
        if out.iter().map(|&b| blocks[b].count()).sum::<usize>() != x.count() {
            return Err(Error::Precondition(format!(
                "{what} leaves the two-dimensional elements"
            )));
        }
        Ok(out)
    };
    let comp_t = coords.composition_term();
    let conv_t = coords.converse_term();
    let mut triples = Vec::new();
    for (b, eb) in blocks.iter().enumerate() {
        for (c, ec) in blocks.iter().enumerate() {
            let env =
                Assignment::from([("x".to_string(), eb.clone()), ("y".to_string(), ec.clone())]);
            for r in to_blocks(&eval(&comp_t, a, &env)?, "composition")? {
                triples.push((r, b, c));
            }
        }
    }
    let mut conv = Vec::with_capacity(k);
    for eb in &blocks {
        let env = Assignment::from([("x".to_string(), eb.clone())]);
        match to_blocks(&eval(&conv_t, a, &env)?, "converse")?[..] {
            [c] => conv.push(c),
            _ => {
                return Err(Error::Precondition(
                    "converse does not map atoms to atoms".into(),
                ))
            }
        }
    }
    let id = to_blocks(
        &eval(&coords.identity_term(), a, &Assignment::new())?,
        "identity",
    )?;
    let frame = AtomStructure::builder((0..k).map(AtomId::Block).collect(), 0)
        .unary(UnaryOp::Converse, Relation::from_function(&conv))
        .constant(ConstName::Id, Element::from_atoms(k, id))
        .composition(Consistency::from_consistent(k, triples))
        .declare(Signature::relational())
        .build()?;
    let algebra = complex_algebra(frame);
    let associative = check_associativity.then(|| atom_associative(&algebra));
    Ok(RaReduct {
        algebra,
        blocks,
        coords,
        atoms: k,
        associative,
    })
}

/// `(b;c);d = b;(c;d)` for all atoms.
pub fn atom_associative(a: &FiniteBao) -> bool {
    let Some(comp) = a.frame().composition() else {
        return false;
    };
    let n = a.len();
    (0..n).all(|b| {
        (0..n).all(|c| {
            let bc = comp.compose_atoms(b, c);
            (0..n).all(|d| {
                comp.compose(bc, &a.atom(d)) == comp.compose(&a.atom(b), comp.compose_atoms(c, d))
            })
        })
    })
}

/// Atom-level relation algebra conditions of a finite relational frame.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RaAxiomReport {
    pub atoms: usize,
    /// `(name, holds)` per condition, in a fixed order.
    pub conditions: Vec<(String, bool)>,
    pub first_failure: Option<String>,
}

impl RaAxiomReport {
    pub fn holds(&self) -> bool {
        self.conditions.iter().all(|(_, ok)| *ok)
    }

    pub fn condition(&self, name: &str) -> Option<bool> {
        self.conditions
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, ok)| *ok)
    }

    /// Everything except full associativity: the semi-associative axioms.
    pub fn semi_associative(&self) -> bool {
        self.conditions
            .iter()
            .filter(|(n, _)| n != "associativity")
            .all(|(_, ok)| *ok)
    }
}

/// Checks the identity law, converse involution, the cycle law
/// `a ≤ b;c ⇔ b ≤ a;c˘ ⇔ c ≤ b˘;a`, `(b;c)˘ = c˘;b˘`, `(x;1);1 = x;1` and
/// associativity, all over atoms.
pub fn ra_atom_axioms(a: &FiniteBao) -> Result<RaAxiomReport> {
    let n = a.len();
    let comp = a.consistency()?;
    let conv = a
        .relation(&UnaryOp::Converse)?
        .as_function()
        .ok_or_else(|| Error::Frame("converse is not a map on atoms".into()))?;
    let id = a.constant(&ConstName::Id)?;
    let mut first = None;
    let mut note = |msg: String| {
        first.get_or_insert(msg);
    };
    let involution = (0..n).all(|x| conv[conv[x]] == x);
    if !involution {
        note("converse is not an involution".into());
    }
    let mut identity = true;
    for x in 0..n {
        let ax = a.atom(x);
        if comp.compose(&id, &ax) != ax || comp.compose(&ax, &id) != ax {
            identity = false;
            note(format!("1' ; a = a ; 1' = a fails at atom {x}"));
            break;
        }
    }
    let mut cycle = true;
    'cycle: for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                let t = comp.is_consistent(x, y, z);
                if t != comp.is_consistent(y, x, conv[z]) || t != comp.is_consistent(z, conv[y], x)
                {
                    cycle = false;
                    note(format!("cycle law fails at ({x}, {y}, {z})"));
                    break 'cycle;
                }
            }
        }
    }
    let mut converse_comp = true;
    'conv: for y in 0..n {
        for z in 0..n {
            let lhs = Element::from_atoms(n, comp.compose_atoms(y, z).atoms().map(|x| conv[x]));
            if &lhs != comp.compose_atoms(conv[z], conv[y]) {
                converse_comp = false;
                note(format!("(b;c)˘ = c˘;b˘ fails at ({y}, {z})"));
                break 'conv;
            }
        }
    }
    let one = a.one();
    let semi = (0..n).all(|x| {
        let x1 = comp.compose(&a.atom(x), &one);
        comp.compose(&x1, &one) == x1
    });
    if !semi {
        note("(x;1);1 = x;1 fails".into());
    }
    let associative = atom_associative(a);
    if !associative {
        note("composition is not associative".into());
    }
    let conditions = [
        ("converse involution", involution),
        ("identity", identity),
        ("cycle law", cycle),
        ("converse of composition", converse_comp),
        ("semi-associativity", semi),
        ("associativity", associative),
    ]
    .into_iter()
    .map(|(s, b)| (s.to_string(), b))
    .collect();
    Ok(RaAxiomReport {
        atoms: n,
        conditions,
        first_failure: first,
    })
}

/// A relational term view of the reduct operations, for documentation and reports.
pub fn ra_terms(coords: RaCoords) -> [(String, Term); 3] {
    [
        ("composition".into(), coords.composition_term()),
        ("converse".into(), coords.converse_term()),
        ("identity".into(), coords.identity_term()),
    ]
}

/// One failed frame condition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub check: String,
    pub detail: String,
    pub witness: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CorrespondentReport {
    pub dim: usize,
    pub checked: Vec<String>,
    pub violations: Vec<Violation>,
}

impl CorrespondentReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Frame conditions equivalent, on complex algebras, to the cylindric axioms
/// C1–C7 in dimension `n`:
///
/// * C1: always holds (operators are normal);
/// * C2: each `T_i` is reflexive;
/// * C3: each `T_i` is symmetric and transitive;
/// * C4: `T_i ∘ T_j = T_j ∘ T_i`;
/// * C5: `E_ii` is every atom;
/// * C6: `E_ij = {a : ∃b (a,b) ∈ T_k, b ∈ E_ik ∩ E_kj}` for distinct `i, j, k`;
/// * C7: for `i ≠ j` no atom has two `T_i`-successors in `E_ij`.
pub fn ca_frame_correspondents(f: &AtomStructure, n: usize) -> Result<CorrespondentReport> {
    let atoms = f.len();
    let rel = |i: usize| {
        f.unary(&UnaryOp::Cyl(i))
            .ok_or_else(|| Error::UnknownSymbol(UnaryOp::Cyl(i).to_string()))
    };
    let e = |i: usize, j: usize| {
        f.constant(&ConstName::Diag(i, j))
            .ok_or_else(|| Error::UnknownSymbol(ConstName::Diag(i, j).to_string()))
    };
    let mut violations = Vec::new();
    let mut push = |check: &str, detail: String, witness: Vec<usize>| {
        violations.push(Violation {
            check: check.into(),
            detail,
            witness,
        })
    };
    for i in 0..n {
        let t = rel(i)?;
        if let Some(a) = (0..atoms).find(|&a| !t.contains(a, a)) {
            push("C2", format!("T_{i} is not reflexive"), vec![a]);
        }
        if t.equivalence_classes().is_none() {
            let sym = t.pairs().find(|&(a, b)| !t.contains(b, a));
            let witness = match sym {
                Some((a, b)) => vec![a, b],
                None => t
                    .pairs()
                    .find_map(|(a, b)| {
                        t.image(a)
                            .iter()
                            .find(|&&c| !t.contains(c as usize, b))
                            .map(|&c| vec![c as usize, a, b])
                    })
                    .unwrap_or_default(),
            };
            if !witness.is_empty() {
                push(
                    "C3",
                    format!("T_{i} is not symmetric and transitive"),
                    witness,
                );
            }
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            let (ti, tj) = (rel(i)?, rel(j)?);
            for b in 0..atoms {
                let x = Element::atom(atoms, b);
                if ti.apply(&tj.apply(&x)) != tj.apply(&ti.apply(&x)) {
                    push("C4", format!("T_{i} and T_{j} do not commute"), vec![b]);
                    break;
                }
            }
        }
    }
    for i in 0..n {
        let d = e(i, i)?;
        if !d.is_one() {
            push(
                "C5",
                format!("E_{i}{i} misses an atom"),
                d.complement().as_vec(),
            );
        }
    }
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if i == j || k == i || k == j {
                    continue;
                }
                let rhs = rel(k)?.apply(&(e(i, k)? & e(k, j)?));
                let lhs = e(i, j)?;
                if &rhs != lhs {
                    let diff = (&(lhs & &rhs.complement()) | &(&rhs & &lhs.complement())).as_vec();
                    push(
                        "C6",
                        format!("E_{i}{j} differs from T_{k}[E_{i}{k} ∩ E_{k}{j}]"),
                        diff,
                    );
                }
            }
        }
    }
    for i in 0..n {
        let w = rel(i)?.witnesses();
        for j in 0..n {
            if i == j {
                continue;
            }
            let d = e(i, j)?;
            for a in 0..atoms {
                let hits: Vec<usize> = w
                    .row(a)
                    .iter()
                    .map(|&b| b as usize)
                    .filter(|&b| d.contains(b))
                    .collect();
                if hits.len() > 1 {
                    push(
                        "C7",
                        format!("a T_{i}-class meets E_{i}{j} twice"),
                        vec![a, hits[0], hits[1]],
                    );
                    break;
                }
            }
        }
    }
    let checked = ["C1", "C2", "C3", "C4", "C5", "C6", "C7"]
        .map(String::from)
        .to_vec();
    Ok(CorrespondentReport {
        dim: n,
        checked,
        violations,
    })
}

/// Atom-level conditions for the transpositions `p_ij` present in a frame:
///
/// * P1: `p_ij` is an involution on atoms;
/// * P2: `p_ij c_k x = c_σ(k) p_ij x` with `σ = [i, j]`;
/// * P3: `p_ij` maps `E_kl` onto `E_σ(k)σ(l)`;
/// * P4: `p_ij` fixes every atom of `E_ij`.
pub fn pea_frame_checks(f: &AtomStructure, n: usize) -> Result<CorrespondentReport> {
    let atoms = f.len();
    let mut violations = Vec::new();
    let mut push = |check: &str, detail: String, witness: Vec<usize>| {
        violations.push(Violation {
            check: check.into(),
            detail,
            witness,
        })
    };
    for i in 0..n {
        for j in i + 1..n {
            let op = UnaryOp::Swap(i, j);
            let Some(rel) = f.unary(&op) else { continue };
            let sigma = |k: usize| {
                if k == i {
                    j
                } else if k == j {
                    i
                } else {
                    k
                }
            };
            let Some(p) = rel.as_function() else {
                push("P1", format!("{op} is not a map on atoms"), Vec::new());
                continue;
            };
            if let Some(a) = (0..atoms).find(|&a| p[p[a]] != a) {
                push("P1", format!("{op} is not an involution"), vec![a]);
            }
            let image = |x: &Element| Element::from_atoms(atoms, x.atoms().map(|a| p[a]));
            for k in 0..n {
                let (Some(tk), Some(tsk)) =
                    (f.unary(&UnaryOp::Cyl(k)), f.unary(&UnaryOp::Cyl(sigma(k))))
                else {
                    continue;
                };
                if let Some(a) = (0..atoms).find(|&a| {
                    let x = Element::atom(atoms, a);
                    image(&tk.apply(&x)) != tsk.apply(&image(&x))
                }) {
                    push(
                        "P2",
                        format!("{op} c_{k} differs from c_{} {op}", sigma(k)),
                        vec![a],
                    );
                }
                for l in 0..n {
                    let (Some(e), Some(es)) = (
                        f.constant(&ConstName::Diag(k, l)),
                        f.constant(&ConstName::Diag(sigma(k), sigma(l))),
                    ) else {
                        continue;
                    };
                    if &image(e) != es {
                        push(
                            "P3",
                            format!("{op} does not map d_{k}{l} onto d_{}{}", sigma(k), sigma(l)),
                            Vec::new(),
                        );
                    }
                }
            }
            if let Some(e) = f.constant(&ConstName::Diag(i, j)) {
                if let Some(a) = e.atoms().find(|&a| p[a] != a) {
                    push("P4", format!("{op} moves an atom of d_{i}{j}"), vec![a]);
                }
            }
        }
    }
    let checked = ["P1", "P2", "P3", "P4"].map(String::from).to_vec();
    Ok(CorrespondentReport {
        dim: n,
        checked,
        violations,
    })
}

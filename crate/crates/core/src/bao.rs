//! Complex algebras of atom structures.

use std::sync::Arc;

use crate::atom::AtomId;
use crate::element::Element;
use crate::error::{Error, Result};
use crate::frame::{AtomStructure, Consistency, Relation};
use crate::ops::{ConstName, Signature, UnaryOp};

/// The complex algebra of a finite atom structure.
///
/// Every element is a set of atoms, and every operator is evaluated atomwise,
/// so operators are normal and completely additive by construction.
#[derive(Clone, Debug)]
pub struct FiniteBao {
    frame: Arc<AtomStructure>,
}

/// Builds the complex algebra of `frame`.
pub fn complex_algebra(frame: AtomStructure) -> FiniteBao {
    FiniteBao {
        frame: Arc::new(frame),
    }
}

impl From<AtomStructure> for FiniteBao {
    fn from(frame: AtomStructure) -> Self {
        complex_algebra(frame)
    }
}

impl FiniteBao {
    pub fn frame(&self) -> &AtomStructure {
        &self.frame
    }

    pub fn signature(&self) -> &Signature {
        self.frame.signature()
    }

    pub fn dim(&self) -> usize {
        self.frame.dim()
    }

    /// Number of atoms.
    pub fn len(&self) -> usize {
        self.frame.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frame.is_empty()
    }

    pub fn zero(&self) -> Element {
        Element::zero(self.len())
    }

    pub fn one(&self) -> Element {
        Element::one(self.len())
    }

    pub fn atom(&self, index: usize) -> Element {
        Element::atom(self.len(), index)
    }

    pub fn atom_id(&self, index: usize) -> &AtomId {
        &self.frame.atoms()[index]
    }

    fn check(&self, x: &Element) -> Result<()> {
        if x.universe() != self.len() {
            return Err(Error::FrameMismatch {
                expected: self.len(),
                found: x.universe(),
            });
        }
        Ok(())
    }

    pub fn relation(&self, op: &UnaryOp) -> Result<&Relation> {
        self.frame
            .unary(op)
            .ok_or_else(|| Error::UnknownSymbol(op.to_string()))
    }

    pub fn apply(&self, op: &UnaryOp, x: &Element) -> Result<Element> {
        self.check(x)?;
        Ok(self.relation(op)?.apply(x))
    }

    pub fn cyl(&self, i: usize, x: &Element) -> Result<Element> {
        self.apply(&UnaryOp::Cyl(i), x)
    }

    pub fn constant(&self, name: &ConstName) -> Result<Element> {
        self.frame
            .constant(name)
            .cloned()
            .ok_or_else(|| Error::UnknownSymbol(name.to_string()))
    }

    pub fn diag(&self, i: usize, j: usize) -> Result<Element> {
        self.constant(&ConstName::Diag(i, j))
    }

    pub fn consistency(&self) -> Result<&Consistency> {
        self.frame
            .composition()
            .ok_or_else(|| Error::UnknownSymbol(";".into()))
    }

    pub fn compose(&self, x: &Element, y: &Element) -> Result<Element> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.consistency()?.compose(x, y))
    }

    pub fn converse(&self, x: &Element) -> Result<Element> {
        self.apply(&UnaryOp::Converse, x)
    }

    /// Every element, in mask order; refuses above 20 atoms.
    pub fn elements(&self) -> Result<impl Iterator<Item = Element> + '_> {
        let n = self.len();
        if n > 20 {
            return Err(Error::CapExceeded(format!("enumerating 2^{n} elements")));
        }
        Ok((0..1u64 << n).map(move |m| Element::from_mask(n, m)))
    }

    /// The product algebra: atoms are the disjoint union, operators act
    /// componentwise.
    pub fn product(&self, other: &FiniteBao) -> Result<FiniteBao> {
        if self.signature() != other.signature() {
            return Err(Error::Signature(
                "product factors must share a signature".into(),
            ));
        }
        let (a, b) = (self.frame(), other.frame());
        let (na, nb) = (a.len(), b.len());
        let n = na + nb;
        let atoms = a
            .atoms()
            .iter()
            .map(|id| AtomId::Product {
                factor: 0,
                atom: Box::new(id.clone()),
            })
            .chain(b.atoms().iter().map(|id| AtomId::Product {
                factor: 1,
                atom: Box::new(id.clone()),
            }))
            .collect();
        let mut builder = AtomStructure::builder(atoms, a.dim());
        for (op, ra) in a.unary_ops() {
            let rb = b.unary(op).expect("signatures agree");
            let pairs = ra.pairs().chain(rb.pairs().map(|(x, y)| (x + na, y + na)));
            builder = builder.unary(op.clone(), Relation::from_pairs(n, pairs).normalized());
        }
        for (c, ea) in a.constants() {
            let eb = b.constant(c).expect("signatures agree");
            builder = builder.constant(
                c.clone(),
                Element::from_atoms(n, ea.atoms().chain(eb.atoms().map(|i| i + na))),
            );
        }
        if let (Some(ca), Some(cb)) = (a.composition(), b.composition()) {
            let triples = ca.consistent_triples().chain(
                cb.consistent_triples()
                    .map(|(x, y, z)| (x + na, y + na, z + na)),
            );
            builder = builder.composition(Consistency::from_consistent(n, triples));
        }
        Ok(complex_algebra(builder.build()?))
    }

    /// Injects an element of a factor into a product built by [`FiniteBao::product`].
    /// `offset` is the atom count of the preceding factor.
    pub fn inject(&self, offset: usize, x: &Element) -> Element {
        Element::from_atoms(self.len(), x.atoms().map(|i| i + offset))
    }

    /// The subalgebra generated by `gens` together with the constants.
    pub fn generated_subalgebra(&self, gens: &[Element]) -> Result<Subalgebra> {
        for g in gens {
            self.check(g)?;
        }
        let n = self.len();
        let mut part = Partition::new(n);
        for g in gens {
            part.refine(g);
        }
        for (_, c) in self.frame.constants() {
            part.refine(c);
        }
        loop {
            let before = part.count();
            let blocks = part.blocks();
            for (_, rel) in self.frame.unary_ops() {
                for b in &blocks {
                    part.refine(&rel.apply(b));
                }
            }
            if let Some(comp) = self.frame.composition() {
                for b in &blocks {
                    for c in &blocks {
                        part.refine(&comp.compose(b, c));
                    }
                }
            }
            if part.count() == before {
                break;
            }
        }
        Ok(Subalgebra {
            atoms: part.blocks(),
        })
    }

    /// The sub-BAO whose atoms are the given blocks, which must partition the
    /// atoms and form a subuniverse. Atom identifiers become `Block(k)`.
    pub fn subframe(&self, blocks: &[Element]) -> Result<FiniteBao> {
        let ids = (0..blocks.len()).map(AtomId::Block).collect();
        self.subframe_with_ids(
            blocks,
            ids,
            self.dim(),
            |op| Some(op.clone()),
            |c| Some(c.clone()),
        )
    }

    /// Like [`FiniteBao::subframe`], with explicit identifiers and a signature
    /// renaming; operators mapped to `None` are dropped.
    pub fn subframe_with_ids(
        &self,
        blocks: &[Element],
        ids: Vec<AtomId>,
        dim: usize,
        unary: impl Fn(&UnaryOp) -> Option<UnaryOp>,
        constant: impl Fn(&ConstName) -> Option<ConstName>,
    ) -> Result<FiniteBao> {
        let n = self.len();
        let mut block_of = vec![u32::MAX; n];
        for (k, b) in blocks.iter().enumerate() {
            self.check(b)?;
            for a in b.atoms() {
                if block_of[a] != u32::MAX {
                    return Err(Error::Precondition(format!("atom {a} lies in two blocks")));
                }
                block_of[a] = k as u32;
            }
        }
        if let Some(a) = block_of.iter().position(|&k| k == u32::MAX) {
            return Err(Error::Precondition(format!("atom {a} lies in no block")));
        }
        let members: Vec<Vec<usize>> = blocks.iter().map(|b| b.as_vec()).collect();
        Ok(complex_algebra(
            self.induced(&block_of, &members, ids, dim, unary, constant)?,
        ))
    }

    /// Induced frame on a partition given by `block_of` (atom → block) and the
    /// block member lists.
    pub(crate) fn induced(
        &self,
        block_of: &[u32],
        members: &[Vec<usize>],
        ids: Vec<AtomId>,
        dim: usize,
        unary: impl Fn(&UnaryOp) -> Option<UnaryOp>,
        constant: impl Fn(&ConstName) -> Option<ConstName>,
    ) -> Result<AtomStructure> {
        let k = members.len();
        let mut builder = AtomStructure::builder(ids, dim);
        for (op, rel) in self.frame.unary_ops() {
            let Some(new) = unary(op) else { continue };
            builder = builder.unary(
                new,
                induced_relation(rel, block_of, members).map_err(|e| {
                    Error::Precondition(format!("blocks are not closed under {op}: {e}"))
                })?,
            );
        }
        for (c, e) in self.frame.constants() {
            let Some(new) = constant(c) else { continue };
            let mut out = Element::zero(k);
            for (b, m) in members.iter().enumerate() {
                let inside = m.iter().filter(|&&a| e.contains(a)).count();
                if inside == m.len() {
                    out.insert(b);
                } else if inside != 0 {
                    return Err(Error::Precondition(format!(
                        "constant {c} is not a union of blocks"
                    )));
                }
            }
            builder = builder.constant(new, out);
        }
        if let Some(comp) = self.frame.composition() {
            let n = self.len();
            let elems: Vec<Element> = members
                .iter()
                .map(|m| Element::from_atoms(n, m.iter().copied()))
                .collect();
            let mut triples = Vec::new();
            for (b, eb) in elems.iter().enumerate() {
                for (c, ec) in elems.iter().enumerate() {
                    let bc = comp.compose(eb, ec);
                    for a in blocks_of(&bc, block_of, members).ok_or_else(|| {
                        Error::Precondition("blocks are not closed under composition".into())
                    })? {
                        triples.push((a, b, c));
                    }
                }
            }
            builder = builder.composition(Consistency::from_consistent(k, triples));
        }
        builder.build()
    }
}

/// The blocks whose union is `x`, if `x` is a union of blocks.
fn blocks_of(x: &Element, block_of: &[u32], members: &[Vec<usize>]) -> Option<Vec<usize>> {
    let mut out: Vec<usize> = x.atoms().map(|a| block_of[a] as usize).collect();
    out.sort_unstable();
    out.dedup();
    let total: usize = out.iter().map(|&b| members[b].len()).sum();
    (total == x.count()).then_some(out)
}

fn induced_relation(
    rel: &Relation,
    block_of: &[u32],
    members: &[Vec<usize>],
) -> std::result::Result<Relation, String> {
    let k = members.len();
    match rel {
        Relation::Equivalence { class, members: cm } => {
            // Each block's image is the union of the T-classes it touches; it is
            // a union of blocks iff those classes and the blocks they touch have
            // the same total size.
            let mut images = Vec::with_capacity(k);
            let mut seen_class = vec![usize::MAX; cm.rows()];
            let mut seen_block = vec![usize::MAX; k];
            for (u, m) in members.iter().enumerate() {
                let mut class_total = 0;
                let mut block_total = 0;
                let mut image = Vec::new();
                for &a in m {
                    let c = class[a] as usize;
                    if seen_class[c] == u {
                        continue;
                    }
                    seen_class[c] = u;
                    let row = cm.row(c);
                    class_total += row.len();
                    for &x in row {
                        let v = block_of[x as usize] as usize;
                        if seen_block[v] != u {
                            seen_block[v] = u;
                            block_total += members[v].len();
                            image.push(v);
                        }
                    }
                }
                if class_total != block_total {
                    return Err(format!("image of block {u}"));
                }
                images.push(image);
            }
            Ok(Relation::from_images(images).normalized())
        }
        Relation::Pairs(_) => {
            let n = block_of.len();
            let mut images = Vec::with_capacity(k);
            for (u, m) in members.iter().enumerate() {
                let img = rel.apply(&Element::from_atoms(n, m.iter().copied()));
                images.push(
                    blocks_of(&img, block_of, members)
                        .ok_or_else(|| format!("image of block {u}"))?,
                );
            }
            Ok(Relation::from_images(images).normalized())
        }
    }
}

/// A subalgebra, given by its atoms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subalgebra {
    pub atoms: Vec<Element>,
}

impl Subalgebra {
    pub fn contains(&self, x: &Element) -> bool {
        self.atoms.iter().all(|b| b.le(x) || b.disjoint(x))
    }

    /// Number of elements, `2^atoms`, if it fits in a `u128`.
    pub fn size(&self) -> Option<u128> {
        1u128.checked_shl(self.atoms.len() as u32)
    }

    /// All elements; refuses above 20 atoms.
    pub fn elements(&self) -> Result<Vec<Element>> {
        let k = self.atoms.len();
        if k > 20 {
            return Err(Error::CapExceeded(format!(
                "enumerating 2^{k} subalgebra elements"
            )));
        }
        let n = self.atoms.first().map_or(0, |a| a.universe());
        Ok((0..1u64 << k)
            .map(|m| {
                let mut e = Element::zero(n);
                for (b, atom) in self.atoms.iter().enumerate() {
                    if m >> b & 1 == 1 {
                        e.join_with(atom);
                    }
                }
                e
            })
            .collect())
    }
}

/// A partition of atom indices, refined by membership in sets.
struct Partition {
    class: Vec<usize>,
    count: usize,
}

impl Partition {
    fn new(n: usize) -> Self {
        Partition {
            class: vec![0; n],
            count: usize::from(n > 0),
        }
    }

    fn count(&self) -> usize {
        self.count
    }

    fn refine(&mut self, s: &Element) {
        let mut ids = std::collections::HashMap::new();
        for (a, c) in self.class.iter_mut().enumerate() {
            let key = (*c, s.contains(a));
            let next = ids.len();
            *c = *ids.entry(key).or_insert(next);
        }
        self.count = ids.len();
    }

    fn blocks(&self) -> Vec<Element> {
        let n = self.class.len();
        let mut out = vec![Element::zero(n); self.count];
        for (a, &c) in self.class.iter().enumerate() {
            out[c].insert(a);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_atom_frame() -> FiniteBao {
        let atoms = vec![AtomId::Named("a".into()), AtomId::Named("b".into())];
        let frame = AtomStructure::builder(atoms, 1)
            .unary(
                UnaryOp::Cyl(0),
                Relation::from_pairs(2, [(0, 0), (1, 1), (0, 1)]),
            )
            .build()
            .unwrap();
        complex_algebra(frame)
    }

    #[test]
    fn operators_are_normal_and_additive() {
        let a = two_atom_frame();
        let c0 = UnaryOp::Cyl(0);
        assert!(a.apply(&c0, &a.zero()).unwrap().is_zero());
        let x = a.atom(0);
        let y = a.atom(1);
        let lhs = a.apply(&c0, &(&x | &y)).unwrap();
        let rhs = &a.apply(&c0, &x).unwrap() | &a.apply(&c0, &y).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn product_adds_atoms() {
        let a = two_atom_frame();
        let p = a.product(&a).unwrap();
        assert_eq!(p.len(), 4);
        let x = p.inject(2, &a.atom(1));
        assert_eq!(
            p.cyl(0, &x).unwrap(),
            p.inject(2, &a.cyl(0, &a.atom(1)).unwrap())
        );
    }

    #[test]
    fn generated_by_atoms_is_everything() {
        let a = two_atom_frame();
        let s = a.generated_subalgebra(&[a.atom(0)]).unwrap();
        assert_eq!(s.atoms.len(), 2);
        let trivial = a.generated_subalgebra(&[]).unwrap();
        // c0(1) = 1, so nothing splits the unit.
        assert_eq!(trivial.atoms, vec![a.one()]);
    }

    #[test]
    fn subframe_rejects_open_blocks() {
        let a = two_atom_frame();
        assert!(a.subframe(&[a.atom(0), a.atom(1)]).is_ok());
        let atoms: Vec<AtomId> = (0..3).map(AtomId::Index).collect();
        let frame = AtomStructure::builder(atoms, 1)
            .unary(
                UnaryOp::Cyl(0),
                Relation::from_pairs(3, [(0, 0), (1, 1), (2, 2), (0, 1), (1, 0)]),
            )
            .build()
            .unwrap();
        let b = complex_algebra(frame);
        assert!(b
            .subframe(&[Element::from_atoms(3, [0, 2]), b.atom(1)])
            .is_err());
    }
}

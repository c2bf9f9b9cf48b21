//! Atom structures: the frames whose complex algebras are the working algebras.
//!
//! A unary operator `op` is stored as a binary relation `T` on atoms, read
//! as `op(X) = {a : ∃b ∈ X, (a, b) ∈ T}`. So `(a, b) ∈ T` means "b witnesses
//! a". The relation is kept indexed by the witness `b`, which is the
//! direction the complex-algebra operator needs.

use std::collections::BTreeMap;

use crate::atom::AtomId;
use crate::element::Element;
use crate::error::{Error, Result};
use crate::ops::{ConstName, Signature, UnaryOp};

/// Compressed sparse rows of `u32` indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Csr {
    offsets: Vec<u32>,
    items: Vec<u32>,
}

impl Csr {
    /// Builds rows from `(row, item)` pairs; rows come out sorted and deduplicated.
    pub fn from_pairs(rows: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Csr {
        let mut pairs: Vec<(u32, u32)> = pairs
            .into_iter()
            .map(|(r, i)| (r as u32, i as u32))
            .collect();
        pairs.sort_unstable();
        pairs.dedup();
        let mut offsets = vec![0u32; rows + 1];
        for &(r, _) in &pairs {
            offsets[r as usize + 1] += 1;
        }
        for r in 0..rows {
            offsets[r + 1] += offsets[r];
        }
        Csr {
            offsets,
            items: pairs.into_iter().map(|(_, i)| i).collect(),
        }
    }

    pub fn from_rows(rows: impl IntoIterator<Item = Vec<usize>>) -> Csr {
        let mut offsets = vec![0u32];
        let mut items = Vec::new();
        for mut row in rows {
            row.sort_unstable();
            row.dedup();
            items.extend(row.into_iter().map(|i| i as u32));
            offsets.push(items.len() as u32);
        }
        Csr { offsets, items }
    }

    pub fn rows(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn row(&self, r: usize) -> &[u32] {
        &self.items[self.offsets[r] as usize..self.offsets[r + 1] as usize]
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn transpose(&self, cols: usize) -> Csr {
        Csr::from_pairs(
            cols,
            (0..self.rows()).flat_map(|r| self.row(r).iter().map(move |&i| (i as usize, r))),
        )
    }
}

/// A binary relation on atoms. Equality compares the pair sets, whatever
/// the representation.
#[derive(Clone, Debug)]
pub enum Relation {
    /// Arbitrary relation; row `b` lists every `a` with `(a, b) ∈ T`.
    Pairs(Csr),
    /// An equivalence relation given by class numbers, with class member lists.
    Equivalence { class: Vec<u32>, members: Csr },
}

impl PartialEq for Relation {
    fn eq(&self, other: &Relation) -> bool {
        self.atoms() == other.atoms() && (0..self.atoms()).all(|b| self.image(b) == other.image(b))
    }
}

impl Eq for Relation {}

impl Relation {
    /// Relation from `(a, b)` pairs over `atoms` atoms.
    pub fn from_pairs(atoms: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Relation {
        Relation::Pairs(Csr::from_pairs(
            atoms,
            pairs.into_iter().map(|(a, b)| (b, a)),
        ))
    }

    /// Relation given by the images `op({b})` of every atom `b`.
    pub fn from_images(images: impl IntoIterator<Item = Vec<usize>>) -> Relation {
        Relation::Pairs(Csr::from_rows(images))
    }

    /// The graph of a function on atoms: `op({b}) = {f(b)}`.
    pub fn from_function(f: &[usize]) -> Relation {
        Relation::from_images(f.iter().map(|&a| vec![a]))
    }

    /// Equivalence relation from arbitrary class keys; classes are numbered in
    /// order of first appearance.
    pub fn from_keys<K: std::hash::Hash + Eq>(keys: impl IntoIterator<Item = K>) -> Relation {
        let mut ids = std::collections::HashMap::new();
        let class: Vec<u32> = keys
            .into_iter()
            .map(|k| {
                let next = ids.len() as u32;
                *ids.entry(k).or_insert(next)
            })
            .collect();
        Relation::from_classes(class)
    }

    pub fn from_classes(class: Vec<u32>) -> Relation {
        let classes = class.iter().copied().max().map_or(0, |m| m as usize + 1);
        let members = Csr::from_pairs(
            classes,
            class.iter().enumerate().map(|(a, &c)| (c as usize, a)),
        );
        Relation::Equivalence { class, members }
    }

    pub fn atoms(&self) -> usize {
        match self {
            Relation::Pairs(csr) => csr.rows(),
            Relation::Equivalence { class, .. } => class.len(),
        }
    }

    /// Every `a` with `(a, b) ∈ T`, i.e. the atoms of `op({b})`.
    pub fn image(&self, b: usize) -> &[u32] {
        match self {
            Relation::Pairs(csr) => csr.row(b),
            Relation::Equivalence { class, members } => members.row(class[b] as usize),
        }
    }

    pub fn contains(&self, a: usize, b: usize) -> bool {
        match self {
            Relation::Pairs(csr) => csr.row(b).binary_search(&(a as u32)).is_ok(),
            Relation::Equivalence { class, .. } => class[a] == class[b],
        }
    }

    /// Number of pairs in the relation.
    pub fn size(&self) -> usize {
        match self {
            Relation::Pairs(csr) => csr.len(),
            Relation::Equivalence { members, .. } => (0..members.rows())
                .map(|c| members.row(c).len().pow(2))
                .sum(),
        }
    }

    /// All `(a, b)` pairs, ordered by `b` then `a`.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.atoms()).flat_map(move |b| self.image(b).iter().map(move |&a| (a as usize, b)))
    }

    /// Applies the induced operator: `{a : ∃b ∈ x, (a, b) ∈ T}`.
    pub fn apply(&self, x: &Element) -> Element {
        let mut out = Element::zero(self.atoms());
        match self {
            Relation::Pairs(csr) => {
                for b in x.atoms() {
                    for &a in csr.row(b) {
                        out.insert(a as usize);
                    }
                }
            }
            Relation::Equivalence { class, members } => {
                let mut seen = vec![false; members.rows()];
                for b in x.atoms() {
                    let c = class[b] as usize;
                    if !std::mem::replace(&mut seen[c], true) {
                        for &a in members.row(c) {
                            out.insert(a as usize);
                        }
                    }
                }
            }
        }
        out
    }

    /// Class numbers if the relation is an equivalence relation.
    pub fn equivalence_classes(&self) -> Option<Vec<u32>> {
        match self {
            Relation::Equivalence { class, .. } => Some(class.clone()),
            Relation::Pairs(csr) => {
                let n = csr.rows();
                let mut class = vec![u32::MAX; n];
                let mut next = 0u32;
                for b in 0..n {
                    let row = csr.row(b);
                    if row.binary_search(&(b as u32)).is_err() {
                        return None;
                    }
                    if class[b] == u32::MAX {
                        for &a in row {
                            if class[a as usize] != u32::MAX {
                                return None;
                            }
                            class[a as usize] = next;
                        }
                        next += 1;
                    }
                    // every member of b's class must have exactly the same row
                    for &a in row {
                        if csr.row(a as usize) != row {
                            return None;
                        }
                    }
                }
                Some(class)
            }
        }
    }

    /// Converts to the compact equivalence form when possible.
    pub fn normalized(self) -> Relation {
        match &self {
            Relation::Pairs(_) => match self.equivalence_classes() {
                Some(class) => Relation::from_classes(class),
                None => self,
            },
            Relation::Equivalence { .. } => self,
        }
    }

    /// The function `b ↦ a` when every image is a single atom.
    pub fn as_function(&self) -> Option<Vec<usize>> {
        (0..self.atoms())
            .map(|b| match self.image(b) {
                [a] => Some(*a as usize),
                _ => None,
            })
            .collect()
    }

    /// Successor lists: for each `a`, every `b` with `(a, b) ∈ T`.
    pub fn witnesses(&self) -> Csr {
        match self {
            Relation::Pairs(csr) => csr.transpose(csr.rows()),
            Relation::Equivalence { class, members } => Csr::from_rows(class.iter().map(|&c| {
                members
                    .row(c as usize)
                    .iter()
                    .map(|&i| i as usize)
                    .collect()
            })),
        }
    }
}

/// The consistency predicate of a binary composition: `(a, b, c)` is
/// consistent iff `a ≤ b ; c`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Consistency {
    atoms: usize,
    // table[b * atoms + c] = b ; c
    table: Vec<Element>,
}

impl Consistency {
    pub fn from_consistent(
        atoms: usize,
        triples: impl IntoIterator<Item = (usize, usize, usize)>,
    ) -> Consistency {
        let mut table = vec![Element::zero(atoms); atoms * atoms];
        for (a, b, c) in triples {
            table[b * atoms + c].insert(a);
        }
        Consistency { atoms, table }
    }

    pub fn from_predicate(
        atoms: usize,
        consistent: impl Fn(usize, usize, usize) -> bool,
    ) -> Consistency {
        let mut table = vec![Element::zero(atoms); atoms * atoms];
        for b in 0..atoms {
            for c in 0..atoms {
                for a in 0..atoms {
                    if consistent(a, b, c) {
                        table[b * atoms + c].insert(a);
                    }
                }
            }
        }
        Consistency { atoms, table }
    }

    /// From the complementary set of forbidden triples.
    pub fn from_forbidden(
        atoms: usize,
        triples: impl IntoIterator<Item = (usize, usize, usize)>,
    ) -> Consistency {
        let mut table = vec![Element::one(atoms); atoms * atoms];
        for (a, b, c) in triples {
            table[b * atoms + c].remove(a);
        }
        Consistency { atoms, table }
    }

    pub fn atoms(&self) -> usize {
        self.atoms
    }

    pub fn is_consistent(&self, a: usize, b: usize, c: usize) -> bool {
        self.table[b * self.atoms + c].contains(a)
    }

    /// `b ; c` for atoms.
    pub fn compose_atoms(&self, b: usize, c: usize) -> &Element {
        &self.table[b * self.atoms + c]
    }

    pub fn compose(&self, x: &Element, y: &Element) -> Element {
        let mut out = Element::zero(self.atoms);
        for b in x.atoms() {
            for c in y.atoms() {
                out.join_with(&self.table[b * self.atoms + c]);
            }
        }
        out
    }

    pub fn consistent_triples(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        (0..self.atoms).flat_map(move |b| {
            (0..self.atoms).flat_map(move |c| {
                self.table[b * self.atoms + c]
                    .atoms()
                    .map(move |a| (a, b, c))
            })
        })
    }

    pub fn forbidden_triples(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        (0..self.atoms).flat_map(move |b| {
            (0..self.atoms).flat_map(move |c| {
                self.table[b * self.atoms + c]
                    .complement()
                    .as_vec()
                    .into_iter()
                    .map(move |a| (a, b, c))
            })
        })
    }
}

/// A finite atom structure.
#[derive(Clone, Debug, PartialEq)]
pub struct AtomStructure {
    atoms: Vec<AtomId>,
    signature: Signature,
    unary: BTreeMap<UnaryOp, Relation>,
    composition: Option<Consistency>,
    constants: BTreeMap<ConstName, Element>,
}

impl AtomStructure {
    pub fn builder(atoms: Vec<AtomId>, dim: usize) -> FrameBuilder {
        FrameBuilder {
            atoms,
            dim,
            unary: BTreeMap::new(),
            composition: None,
            constants: BTreeMap::new(),
            declared: None,
        }
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn atoms(&self) -> &[AtomId] {
        &self.atoms
    }

    pub fn atom_index(&self, id: &AtomId) -> Option<usize> {
        self.atoms.iter().position(|a| a == id)
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn dim(&self) -> usize {
        self.signature.dim
    }

    pub fn unary(&self, op: &UnaryOp) -> Option<&Relation> {
        self.unary.get(op)
    }

    pub fn unary_ops(&self) -> impl Iterator<Item = (&UnaryOp, &Relation)> {
        self.unary.iter()
    }

    pub fn constant(&self, name: &ConstName) -> Option<&Element> {
        self.constants.get(name)
    }

    pub fn constants(&self) -> impl Iterator<Item = (&ConstName, &Element)> {
        self.constants.iter()
    }

    pub fn composition(&self) -> Option<&Consistency> {
        self.composition.as_ref()
    }

    /// Rebuilds a frame with a subset of the operators kept and optionally renamed.
    pub fn map_signature(
        &self,
        dim: usize,
        unary: impl Fn(&UnaryOp) -> Option<UnaryOp>,
        constant: impl Fn(&ConstName) -> Option<ConstName>,
        keep_composition: bool,
    ) -> Result<AtomStructure> {
        let mut b = AtomStructure::builder(self.atoms.clone(), dim);
        for (op, rel) in &self.unary {
            if let Some(new) = unary(op) {
                b = b.unary(new, rel.clone());
            }
        }
        for (c, e) in &self.constants {
            if let Some(new) = constant(c) {
                b = b.constant(new, e.clone());
            }
        }
        if keep_composition {
            if let Some(comp) = &self.composition {
                b = b.composition(comp.clone());
            }
        }
        b.build()
    }
}

pub struct FrameBuilder {
    atoms: Vec<AtomId>,
    dim: usize,
    unary: BTreeMap<UnaryOp, Relation>,
    composition: Option<Consistency>,
    constants: BTreeMap<ConstName, Element>,
    declared: Option<Signature>,
    // duplicate slots are recorded so build() can report them
}

impl FrameBuilder {
    pub fn unary(mut self, op: UnaryOp, rel: Relation) -> Self {
        self.unary.insert(op, rel);
        self
    }

    pub fn constant(mut self, name: ConstName, value: Element) -> Self {
        self.constants.insert(name, value);
        self
    }

    pub fn composition(mut self, comp: Consistency) -> Self {
        self.composition = Some(comp);
        self
    }

    /// Declares the signature explicitly; `build` then requires every slot
    /// to be filled exactly by the supplied entries.
    pub fn declare(mut self, sig: Signature) -> Self {
        self.declared = Some(sig);
        self
    }

    pub fn build(self) -> Result<AtomStructure> {
        let n = self.atoms.len();
        let mut seen = std::collections::HashSet::new();
        for a in &self.atoms {
            if !seen.insert(a) {
                return Err(Error::Frame(format!("duplicate atom identifier {a}")));
            }
        }
        for (op, rel) in &self.unary {
            if rel.atoms() != n {
                return Err(Error::Frame(format!(
                    "relation {op} covers {} atoms, frame has {n}",
                    rel.atoms()
                )));
            }
            if let Relation::Pairs(csr) = rel {
                if csr.row_items_out_of(n) {
                    return Err(Error::Frame(format!(
                        "relation {op} refers to an atom outside 0..{n}"
                    )));
                }
            }
            for i in op.indices() {
                if i >= self.dim {
                    return Err(Error::Frame(format!(
                        "operator {op} uses index {i} outside dimension {}",
                        self.dim
                    )));
                }
            }
            if let UnaryOp::Subst(t) = op {
                if t.len() != self.dim || t.iter().any(|&v| v >= self.dim) {
                    return Err(Error::Frame(format!(
                        "transformation {op} is not a map on {}",
                        self.dim
                    )));
                }
            }
        }
        for (c, e) in &self.constants {
            if e.universe() != n {
                return Err(Error::Frame(format!(
                    "constant {c} has universe {}, frame has {n}",
                    e.universe()
                )));
            }
            for i in c.indices() {
                if i >= self.dim {
                    return Err(Error::Frame(format!(
                        "constant {c} uses index {i} outside dimension {}",
                        self.dim
                    )));
                }
            }
        }
        if let Some(comp) = &self.composition {
            if comp.atoms() != n {
                return Err(Error::Frame(format!(
                    "consistency predicate covers {} atoms, frame has {n}",
                    comp.atoms()
                )));
            }
        }
        if let Some(conv) = self.unary.get(&UnaryOp::Converse) {
            let f = conv
                .as_function()
                .ok_or_else(|| Error::Frame("converse is not a map on atoms".into()))?;
            if (0..n).any(|a| f[f[a]] != a) {
                return Err(Error::Frame(
                    "converse is not an involution on atoms".into(),
                ));
            }
        }
        let signature = Signature {
            dim: self.dim,
            unary: self.unary.keys().cloned().collect(),
            constants: self.constants.keys().cloned().collect(),
            composition: self.composition.is_some(),
        };
        if let Some(decl) = &self.declared {
            check_declared(decl, &signature)?;
        }
        Ok(AtomStructure {
            atoms: self.atoms,
            signature,
            unary: self.unary,
            composition: self.composition,
            constants: self.constants,
        })
    }
}

impl Csr {
    fn row_items_out_of(&self, n: usize) -> bool {
        self.items.iter().any(|&i| i as usize >= n)
    }
}

fn check_declared(decl: &Signature, actual: &Signature) -> Result<()> {
    if decl.dim != actual.dim {
        return Err(Error::Frame(format!(
            "declared dimension {} but frame has {}",
            decl.dim, actual.dim
        )));
    }
    let mut du = decl.unary.clone();
    du.sort();
    if du.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Frame("a unary slot is declared twice".into()));
    }
    let mut dc = decl.constants.clone();
    dc.sort();
    if dc.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Frame("a constant slot is declared twice".into()));
    }
    if du != actual.unary {
        let missing: Vec<String> = du
            .iter()
            .filter(|o| !actual.unary.contains(o))
            .map(|o| o.to_string())
            .collect();
        let extra: Vec<String> = actual
            .unary
            .iter()
            .filter(|o| !du.contains(o))
            .map(|o| o.to_string())
            .collect();
        return Err(Error::Frame(format!(
            "unary slots differ from declaration: missing {missing:?}, undeclared {extra:?}"
        )));
    }
    if dc != actual.constants {
        let missing: Vec<String> = dc
            .iter()
            .filter(|o| !actual.constants.contains(o))
            .map(|o| o.to_string())
            .collect();
        let extra: Vec<String> = actual
            .constants
            .iter()
            .filter(|o| !dc.contains(o))
            .map(|o| o.to_string())
            .collect();
        return Err(Error::Frame(format!(
            "constant slots differ from declaration: missing {missing:?}, undeclared {extra:?}"
        )));
    }
    if decl.composition != actual.composition {
        return Err(Error::Frame(
            "composition slot differs from declaration".into(),
        ));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equivalence_detection() {
        let r = Relation::from_pairs(3, [(0, 0), (1, 1), (2, 2), (0, 1), (1, 0)]);
        let classes = r.equivalence_classes().unwrap();
        assert_eq!(classes[0], classes[1]);
        assert_ne!(classes[0], classes[2]);
        let not_sym = Relation::from_pairs(2, [(0, 0), (1, 1), (0, 1)]);
        assert!(not_sym.equivalence_classes().is_none());
        let normalized = r.clone().normalized();
        assert!(matches!(normalized, Relation::Equivalence { .. }));
        assert_eq!(
            normalized.pairs().collect::<Vec<_>>(),
            r.pairs().collect::<Vec<_>>()
        );
    }

    #[test]
    fn apply_follows_witness_direction() {
        // (a, b) = (0, 1): b witnesses a.
        let r = Relation::from_pairs(2, [(0, 1)]);
        assert_eq!(r.apply(&Element::atom(2, 1)), Element::atom(2, 0));
        assert!(r.apply(&Element::atom(2, 0)).is_zero());
    }

    #[test]
    fn builder_rejects_bad_frames() {
        let atoms: Vec<AtomId> = (0..2).map(AtomId::Index).collect();
        let bad = AtomStructure::builder(atoms.clone(), 1)
            .unary(UnaryOp::Cyl(1), Relation::from_pairs(2, [(0, 0)]))
            .build();
        assert!(matches!(bad, Err(Error::Frame(_))));
        let bad_conv = AtomStructure::builder(atoms.clone(), 0)
            .unary(UnaryOp::Converse, Relation::from_function(&[1, 1]))
            .build();
        assert!(matches!(bad_conv, Err(Error::Frame(_))));
        let undeclared = AtomStructure::builder(atoms, 1)
            .unary(UnaryOp::Cyl(0), Relation::from_pairs(2, [(0, 0), (1, 1)]))
            .declare(Signature {
                dim: 1,
                unary: vec![],
                constants: vec![],
                composition: false,
            })
            .build();
        assert!(matches!(undeclared, Err(Error::Frame(_))));
    }
}

//! Splitting an atom of a set algebra into abstract copies.
//!
//! The base algebra `A′` lives inside the full set algebra on `^α U`, where
//! `U` is the disjoint union of the `U_i` and `R = ∏ U_i`. Splitting replaces
//! each atom `s_τ R` by `p` abstract atoms with the same cylindrifications.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::atom::AtomId;
use crate::bao::{complex_algebra, FiniteBao};
use crate::element::Element;
use crate::error::{Error, Result};
use crate::frame::{AtomStructure, Relation};
use crate::morphisms::{check_homomorphism, MorphismWitness};
use crate::ops::UnaryOp;
use crate::sets::{full_set_algebra, tuple_index, tuples};
use crate::term::{cyl_set, diag, meet_all, not, subst, var, Term};

/// Largest `|^α U|` accepted by [`build_base`].
pub const TUPLE_CAP: usize = 100_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub alpha: usize,
    /// `|U_i|` for `i < α`.
    pub sizes: Vec<usize>,
    /// Number of copies of each split atom.
    pub p: usize,
    /// Generators of the substitution group, as permutations of `α`.
    pub generators: Vec<Vec<usize>>,
}

impl SplitSpec {
    pub fn new(
        alpha: usize,
        sizes: Vec<usize>,
        p: usize,
        generators: Vec<Vec<usize>>,
    ) -> Result<Self> {
        if alpha < 3 {
            return Err(Error::Parameter(format!("dimension {alpha} below 3")));
        }
        if sizes.len() != alpha {
            return Err(Error::Parameter(format!(
                "{} sizes for dimension {alpha}",
                sizes.len()
            )));
        }
        if sizes.contains(&0) {
            return Err(Error::Parameter("every U_i must be nonempty".into()));
        }
        if p == 0 {
            return Err(Error::Parameter("p must be at least 1".into()));
        }
        for g in &generators {
            let distinct: BTreeSet<usize> = g.iter().copied().collect();
            if g.len() != alpha || distinct.len() != alpha || g.iter().any(|&k| k >= alpha) {
                return Err(Error::Parameter(format!(
                    "{g:?} is not a permutation of {alpha}"
                )));
            }
        }
        Ok(SplitSpec {
            alpha,
            sizes,
            p,
            generators,
        })
    }

    /// Three copies of `R` over `U_i` of size 2 with `G = ⟨[0,1]⟩`: more
    /// copies than `|U_0|`, so the split algebra is not representable.
    pub fn toy() -> Self {
        SplitSpec::new(3, vec![2, 2, 2], 3, vec![transposition(3, 0, 1)]).expect("valid preset")
    }

    /// The toy spec with two copies, at most `min |U_i|`.
    pub fn toy_representable() -> Self {
        SplitSpec {
            p: 2,
            ..SplitSpec::toy()
        }
    }

    pub fn base_size(&self) -> usize {
        self.sizes.iter().sum()
    }

    fn offsets(&self) -> Vec<usize> {
        self.sizes
            .iter()
            .scan(0, |acc, &s| {
                let o = *acc;
                *acc += s;
                Some(o)
            })
            .collect()
    }

    /// The group generated by the generators, identity first, then
    /// lexicographic.
    pub fn group(&self) -> Vec<Vec<usize>> {
        let id: Vec<usize> = (0..self.alpha).collect();
        let mut seen: BTreeSet<Vec<usize>> = BTreeSet::from([id.clone()]);
        let mut frontier = vec![id.clone()];
        while let Some(t) = frontier.pop() {
            for g in &self.generators {
                let c = compose(g, &t);
                if seen.insert(c.clone()) {
                    frontier.push(c);
                }
            }
        }
        seen.remove(&id);
        std::iter::once(id).chain(seen).collect()
    }
}

/// The permutation of `alpha` swapping `i` and `j`.
pub fn transposition(alpha: usize, i: usize, j: usize) -> Vec<usize> {
    let mut t: Vec<usize> = (0..alpha).collect();
    t.swap(i, j);
    t
}

/// `σ∘τ`, so that `s_σ s_τ = s_(σ∘τ)`.
fn compose(sigma: &[usize], tau: &[usize]) -> Vec<usize> {
    tau.iter().map(|&k| sigma[k]).collect()
}

fn subst_op(t: &[usize]) -> UnaryOp {
    UnaryOp::Subst(t.to_vec())
}

/// `A′` with its embedding in the full set algebra.
#[derive(Clone, Debug)]
pub struct Base {
    pub spec: SplitSpec,
    pub group: Vec<Vec<usize>>,
    /// The full set algebra on `^α U` with `c_i`, `d_ij` and `s_τ`, `τ ∈ G`.
    pub full: FiniteBao,
    /// `R` as a set of tuples.
    pub r: Element,
    /// The atoms of `A′` as sets of tuples.
    pub blocks: Vec<Element>,
    pub algebra: FiniteBao,
    /// The atom `s_τ R` of `A′`, in group order.
    pub r_atoms: Vec<usize>,
}

impl Base {
    /// `R` as an element of `A′`.
    pub fn r_element(&self) -> Element {
        self.algebra.atom(self.r_atoms[0])
    }

    /// An element of `A′` as a set of tuples.
    pub fn tuples_of(&self, x: &Element) -> Element {
        let mut out = self.full.zero();
        for b in x.atoms() {
            out.join_with(&self.blocks[b]);
        }
        out
    }

    fn group_index(&self, t: &[usize]) -> Option<usize> {
        self.group.iter().position(|g| g == t)
    }

    fn s_tau(&self, tau: usize, x: &Element) -> Result<Element> {
        if tau == 0 {
            Ok(x.clone())
        } else {
            self.full.apply(&subst_op(&self.group[tau]), x)
        }
    }
}

/// Builds `A′ = Sg{R}` inside the full set algebra and checks that the
/// `s_τ R` are distinct atoms of it.
pub fn build_base(spec: &SplitSpec) -> Result<Base> {
    let spec = SplitSpec::new(
        spec.alpha,
        spec.sizes.clone(),
        spec.p,
        spec.generators.clone(),
    )?;
    let u = spec.base_size();
    let total = u.checked_pow(spec.alpha as u32).filter(|&c| c <= TUPLE_CAP);
    let Some(total) = total else {
        return Err(Error::CapExceeded(format!(
            "{u}^{} tuples exceed {TUPLE_CAP}",
            spec.alpha
        )));
    };
    let group = spec.group();
    let subs: Vec<UnaryOp> = group.iter().skip(1).map(|t| subst_op(t)).collect();
    let full = full_set_algebra(spec.alpha, u, &subs)?;
    let offsets = spec.offsets();
    let inside = |t: &[usize]| {
        t.iter()
            .enumerate()
            .all(|(i, &v)| v >= offsets[i] && v < offsets[i] + spec.sizes[i])
    };
    let r = Element::from_atoms(
        total,
        tuples(spec.alpha, u)?
            .iter()
            .filter(|t| inside(t))
            .map(|t| tuple_index(t, u)),
    );
    let blocks = full.generated_subalgebra(std::slice::from_ref(&r))?.atoms;
    let algebra = full.subframe(&blocks)?;
    let mut base = Base {
        spec,
        group,
        full,
        r,
        blocks,
        algebra,
        r_atoms: Vec::new(),
    };
    for tau in 0..base.group.len() {
        let image = base.s_tau(tau, &base.r)?;
        let atom = base
            .blocks
            .iter()
            .position(|b| *b == image)
            .ok_or_else(|| {
                Error::Precondition(format!(
                    "s_τR is not an atom of A′ for τ = {:?}",
                    base.group[tau]
                ))
            })?;
        if base.r_atoms.contains(&atom) {
            return Err(Error::Precondition(format!(
                "s_τR repeats for τ = {:?}",
                base.group[tau]
            )));
        }
        base.r_atoms.push(atom);
    }
    Ok(base)
}

/// Where an atom of a split algebra comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Origin {
    /// An atom of `A′` other than the `s_τ R`.
    Prime(usize),
    /// `s_τ R_piece`, with `tau` indexing the group.
    Piece { tau: usize, piece: usize },
}

/// An abstract split algebra with the bookkeeping to relate it to `A′`.
#[derive(Clone, Debug)]
pub struct SplitAlgebra {
    pub algebra: FiniteBao,
    pub p: usize,
    pub group: Vec<Vec<usize>>,
    pub origin: Vec<Origin>,
    /// The atoms replacing each atom of `A′`.
    pub prime: Vec<Vec<usize>>,
    /// The atoms of `A′` as sets of tuples.
    pub prime_sets: Vec<Element>,
    pub r_atoms: Vec<usize>,
}

impl SplitAlgebra {
    /// The image of an element of `A′`.
    pub fn expand(&self, x: &Element) -> Element {
        Element::from_atoms(
            self.algebra.len(),
            x.atoms().flat_map(|b| self.prime[b].iter().copied()),
        )
    }

    /// `s_τ R_j`.
    pub fn piece(&self, tau: usize, j: usize) -> usize {
        self.prime[self.r_atoms[tau]][j]
    }

    /// `R = Σ_j R_j`.
    pub fn r_element(&self) -> Element {
        Element::from_atoms(
            self.algebra.len(),
            self.prime[self.r_atoms[0]].iter().copied(),
        )
    }

    /// The tuples underlying an atom: its `A′` atom, or `s_τ R` for a piece.
    fn cover(&self, atom: usize) -> &Element {
        match self.origin[atom] {
            Origin::Prime(b) => &self.prime_sets[b],
            Origin::Piece { tau, .. } => &self.prime_sets[self.r_atoms[tau]],
        }
    }
}

/// Splits every `s_τ R` of `A′` into `p` atoms.
pub fn split(base: &Base, p: usize) -> Result<SplitAlgebra> {
    if p == 0 {
        return Err(Error::Parameter("p must be at least 1".into()));
    }
    let a = &base.algebra;
    let split_of: HashMap<usize, usize> = base
        .r_atoms
        .iter()
        .enumerate()
        .map(|(t, &b)| (b, t))
        .collect();
    let mut origin = Vec::new();
    let mut prime = Vec::with_capacity(a.len());
    for b in 0..a.len() {
        let start = origin.len();
        match split_of.get(&b) {
            Some(&tau) => origin.extend((0..p).map(|piece| Origin::Piece { tau, piece })),
            None => origin.push(Origin::Prime(b)),
        }
        prime.push((start..origin.len()).collect::<Vec<_>>());
    }
    let n = origin.len();
    let expand = |x: &[u32]| {
        x.iter()
            .flat_map(|&b| prime[b as usize].iter().copied())
            .collect::<Vec<_>>()
    };
    let ids = origin
        .iter()
        .map(|o| match *o {
            Origin::Prime(b) => AtomId::Block(b),
            Origin::Piece { tau, piece } => AtomId::Split { tau, piece },
        })
        .collect();
    let mut builder = AtomStructure::builder(ids, a.dim());
    for (op, rel) in a.frame().unary_ops() {
        let mut images = Vec::with_capacity(n);
        for o in &origin {
            let image = match (*o, op) {
                (Origin::Prime(b), _) => expand(rel.image(b)),
                (Origin::Piece { tau, piece }, UnaryOp::Subst(sigma)) => {
                    let target = base
                        .group_index(&compose(sigma, &base.group[tau]))
                        .ok_or_else(|| {
                            Error::Precondition(format!("group not closed under {op}"))
                        })?;
                    vec![prime[base.r_atoms[target]][piece]]
                }
                (Origin::Piece { tau, .. }, _) => expand(rel.image(base.r_atoms[tau])),
            };
            images.push(image);
        }
        builder = builder.unary(op.clone(), Relation::from_images(images).normalized());
    }
    for (c, e) in a.frame().constants() {
        let atoms: Vec<u32> = e.atoms().map(|b| b as u32).collect();
        builder = builder.constant(c.clone(), Element::from_atoms(n, expand(&atoms)));
    }
    Ok(SplitAlgebra {
        algebra: complex_algebra(builder.build()?),
        p,
        group: base.group.clone(),
        origin,
        prime,
        prime_sets: base.blocks.clone(),
        r_atoms: base.r_atoms.clone(),
    })
}

/// `τ(x) = ∏_{i≤m} s_i^0 c_1…c_m x · ∏_{i<j≤m} −d_ij` with `s_i^0 y = c_0(d_0i·y)`.
pub fn witness_term(m: usize, dim: usize) -> Result<Term> {
    if m + 1 > dim {
        return Err(Error::Parameter(format!(
            "witness for m = {m} needs dimension {}, have {dim}",
            m + 1
        )));
    }
    let inner = cyl_set(1..=m, var("x"));
    let substs = (0..=m).map(|i| subst(0, i, inner.clone()));
    let distinct = (0..=m).flat_map(|i| (i + 1..=m).map(move |j| not(diag(i, j))));
    Ok(meet_all(substs.chain(distinct)))
}

/// `R_i ≡ R_j` iff every `s_τ R_i` and `s_τ R_j` lie below the same
/// generators. Blocks are listed by first member.
pub fn blur(a: &SplitAlgebra, gens: &[Element]) -> Vec<Vec<usize>> {
    let mut blocks: Vec<(Vec<bool>, Vec<usize>)> = Vec::new();
    for j in 0..a.p {
        let key: Vec<bool> = gens
            .iter()
            .flat_map(|g| (0..a.group.len()).map(move |t| g.contains(a.piece(t, j))))
            .collect();
        match blocks.iter_mut().find(|(k, _)| *k == key) {
            Some((_, members)) => members.push(j),
            None => blocks.push((key, vec![j])),
        }
    }
    blocks.into_iter().map(|(_, m)| m).collect()
}

/// The subalgebra `B` of elements closed under the blur.
#[derive(Clone, Debug)]
pub struct SmallSubalgebra {
    pub algebra: FiniteBao,
    pub blocks: Vec<Vec<usize>>,
    /// Atoms of `B` as elements of the split algebra.
    pub members: Vec<Element>,
    /// Where each atom of `B` comes from: an `A′` atom, or `(τ, block)`.
    pub origin: Vec<Origin>,
}

pub fn small_subalgebra(a: &SplitAlgebra, gens: &[Element]) -> Result<SmallSubalgebra> {
    let blocks = blur(a, gens);
    let n = a.algebra.len();
    let mut members = Vec::new();
    let mut origin = Vec::new();
    for (atom, o) in a.origin.iter().enumerate() {
        match *o {
            Origin::Prime(b) => {
                members.push(Element::atom(n, atom));
                origin.push(Origin::Prime(b));
            }
            Origin::Piece { tau, piece: 0 } => {
                for (k, block) in blocks.iter().enumerate() {
                    members.push(Element::from_atoms(
                        n,
                        block.iter().map(|&j| a.piece(tau, j)),
                    ));
                    origin.push(Origin::Piece { tau, piece: k });
                }
            }
            Origin::Piece { .. } => {}
        }
    }
    let algebra = a.algebra.subframe(&members)?;
    Ok(SmallSubalgebra {
        algebra,
        blocks,
        members,
        origin,
    })
}

/// `R_j″ = {z ∈ R : Σ_i f_i(z_i) ≡ j mod q}` with `f_i` counting from the
/// first element of `U_i`.
pub fn real_partition(base: &Base, q: usize) -> Result<Vec<Element>> {
    let spec = &base.spec;
    let smallest = spec.sizes.iter().copied().min().unwrap_or(0);
    if q == 0 || q > smallest {
        return Err(Error::Precondition(format!(
            "q = {q} outside 1..={smallest}"
        )));
    }
    let u = spec.base_size();
    let offsets = spec.offsets();
    let mut cells = vec![base.full.zero(); q];
    for (k, t) in tuples(spec.alpha, u)?.iter().enumerate() {
        if base.r.contains(k) {
            let sum: usize = t.iter().zip(&offsets).map(|(&v, &o)| v - o).sum();
            cells[sum % q].insert(k);
        }
    }
    Ok(cells)
}

/// `A″` and the embedding `h` of the small subalgebra into it, with
/// `h(s_τ y_j) = s_τ R′_j`.
#[derive(Clone, Debug)]
pub struct RepEmbedding {
    pub target: FiniteBao,
    /// Atoms of `A″` as sets of tuples.
    pub target_blocks: Vec<Element>,
    pub witness: MorphismWitness,
}

pub fn rep_embedding(base: &Base, small: &SmallSubalgebra) -> Result<RepEmbedding> {
    let p = small.blocks.len();
    let m = base.spec.sizes.iter().copied().min().unwrap_or(0);
    if p > m {
        return Err(Error::Precondition(format!(
            "{p} blocks exceed min |U_i| = {m}"
        )));
    }
    let cells = real_partition(base, m)?;
    let mut merged: Vec<Element> = cells[..p - 1].to_vec();
    let mut last = base.full.zero();
    for c in &cells[p - 1..] {
        last.join_with(c);
    }
    merged.push(last);
    let mut pieces = Vec::with_capacity(base.group.len());
    for tau in 0..base.group.len() {
        pieces.push(
            merged
                .iter()
                .map(|c| base.s_tau(tau, c))
                .collect::<Result<Vec<_>>>()?,
        );
    }
    let mut gens = base.blocks.clone();
    gens.extend(pieces.iter().flatten().cloned());
    let target_blocks = base.full.generated_subalgebra(&gens)?.atoms;
    let target = base.full.subframe(&target_blocks)?;
    let images = small
        .origin
        .iter()
        .map(|o| {
            let set = match *o {
                Origin::Prime(b) => &base.blocks[b],
                Origin::Piece { tau, piece } => &pieces[tau][piece],
            };
            below(&target_blocks, set)
        })
        .collect::<Result<Vec<_>>>()?;
    let witness = check_homomorphism(&small.algebra, &target, &images)?;
    Ok(RepEmbedding {
        target,
        target_blocks,
        witness,
    })
}

/// The atoms of a subalgebra whose union is `set`.
fn below(blocks: &[Element], set: &Element) -> Result<Element> {
    let mut out = Element::zero(blocks.len());
    let mut covered = 0;
    for (k, b) in blocks.iter().enumerate() {
        if b.le(set) {
            out.insert(k);
            covered += b.count();
        }
    }
    if covered != set.count() {
        return Err(Error::Precondition("set is not a union of atoms".into()));
    }
    Ok(out)
}

/// The embedding of `a1` into the `G1`-reduct of `a2` sending `s_τ R_j` to
/// `Σ_{i∈χ(j)} s_τ R_i` and fixing `A′`.
pub fn split_embedding(
    a1: &SplitAlgebra,
    a2: &SplitAlgebra,
    chi: &[Vec<usize>],
) -> Result<MorphismWitness> {
    if chi.len() != a1.p {
        return Err(Error::Precondition(format!(
            "χ has {} entries for p1 = {}",
            chi.len(),
            a1.p
        )));
    }
    let mut hit = vec![false; a2.p];
    for block in chi {
        if block.is_empty() {
            return Err(Error::Precondition("χ has an empty block".into()));
        }
        for &i in block {
            if i >= a2.p || std::mem::replace(&mut hit[i], true) {
                return Err(Error::Precondition(format!(
                    "χ is not a partition of {}",
                    a2.p
                )));
            }
        }
    }
    if hit.contains(&false) {
        return Err(Error::Precondition(format!("χ does not cover {}", a2.p)));
    }
    let tau_map = a1
        .group
        .iter()
        .map(|t| a2.group.iter().position(|g| g == t))
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| Error::Precondition("G1 is not contained in G2".into()))?;
    if a1.prime_sets.first().map(Element::universe) != a2.prime_sets.first().map(Element::universe)
    {
        return Err(Error::Precondition(
            "split algebras over different bases".into(),
        ));
    }
    let g1: BTreeSet<&Vec<usize>> = a1.group.iter().collect();
    let frame = a2.algebra.frame().map_signature(
        a2.algebra.dim(),
        |op| match op {
            UnaryOp::Subst(t) if !g1.contains(t) => None,
            other => Some(other.clone()),
        },
        |c| Some(c.clone()),
        true,
    )?;
    let target = complex_algebra(frame);
    let n2 = a2.algebra.len();
    let mut images = Vec::with_capacity(a1.algebra.len());
    for o in &a1.origin {
        let image = match *o {
            Origin::Prime(b) => {
                let set = &a1.prime_sets[b];
                let mut out = Element::zero(n2);
                let mut covered = Element::zero(set.universe());
                for atom in 0..n2 {
                    let c = a2.cover(atom);
                    if c.le(set) {
                        out.insert(atom);
                        covered.join_with(c);
                    }
                }
                if covered != *set {
                    return Err(Error::Precondition(format!(
                        "atom {b} of A′ is not a union of atoms"
                    )));
                }
                out
            }
            Origin::Piece { tau, piece } => {
                Element::from_atoms(n2, chi[piece].iter().map(|&i| a2.piece(tau_map[tau], i)))
            }
        };
        images.push(image);
    }
    check_homomorphism(&a1.algebra, &target, &images)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sets::{representation_search, Representation, SearchOptions};
    use crate::term::{eval, Assignment};

    fn toy() -> Base {
        build_base(&SplitSpec::toy()).unwrap()
    }

    fn tau_of(a: &FiniteBao, x: &Element, m: usize) -> Element {
        let env = Assignment::from([("x".to_string(), x.clone())]);
        eval(&witness_term(m, a.dim()).unwrap(), a, &env).unwrap()
    }

    #[test]
    fn group_closure() {
        assert_eq!(SplitSpec::toy().group(), vec![vec![0, 1, 2], vec![1, 0, 2]]);
        let spec = SplitSpec::new(
            3,
            vec![1, 1, 1],
            1,
            vec![transposition(3, 0, 1), transposition(3, 1, 2)],
        )
        .unwrap();
        assert_eq!(spec.group().len(), 6);
        assert!(SplitSpec::new(3, vec![1, 1], 1, vec![]).is_err());
        assert!(SplitSpec::new(2, vec![1, 1], 1, vec![]).is_err());
        assert!(SplitSpec::new(3, vec![1, 1, 1], 1, vec![vec![0, 0, 1]]).is_err());
    }

    #[test]
    fn toy_base() {
        let base = toy();
        assert_eq!(base.r.count(), 8);
        assert_eq!(base.algebra.len(), 54);
        assert_eq!(base.r_atoms.len(), 2);
        let swapped = base.tuples_of(&base.algebra.atom(base.r_atoms[1]));
        assert!(swapped.disjoint(&base.r));
        assert_eq!(swapped.count(), 8);
        assert_eq!(base.full.cyl(0, &base.r).unwrap().count(), 6 * 4);
    }

    #[test]
    fn trivial_group_single_atom() {
        let spec = SplitSpec::new(3, vec![2, 1, 1], 2, vec![]).unwrap();
        let base = build_base(&spec).unwrap();
        assert_eq!(base.r_atoms.len(), 1);
        assert_eq!(base.tuples_of(&base.r_element()), base.r);
    }

    #[test]
    fn cap() {
        let spec = SplitSpec::new(3, vec![20, 20, 20], 1, vec![]).unwrap();
        assert!(matches!(build_base(&spec), Err(Error::CapExceeded(_))));
    }

    #[test]
    fn split_counts_and_laws() {
        let base = toy();
        let s = split(&base, 3).unwrap();
        assert_eq!(s.algebra.len(), 54 - 2 + 2 * 3);
        let a = &s.algebra;
        for tau in 0..2 {
            let whole = s.expand(&base.algebra.atom(base.r_atoms[tau]));
            for j in 0..3 {
                let piece = a.atom(s.piece(tau, j));
                for i in 0..3 {
                    assert_eq!(a.cyl(i, &piece).unwrap(), a.cyl(i, &whole).unwrap());
                }
            }
        }
        let swap = UnaryOp::Subst(vec![1, 0, 2]);
        for j in 0..3 {
            let img = a.apply(&swap, &a.atom(s.piece(0, j))).unwrap();
            assert_eq!(img, a.atom(s.piece(1, j)));
            assert_eq!(a.apply(&swap, &img).unwrap(), a.atom(s.piece(0, j)));
        }
    }

    #[test]
    fn one_piece_is_the_base() {
        let base = toy();
        let s = split(&base, 1).unwrap();
        let images: Vec<Element> = (0..base.algebra.len())
            .map(|b| s.expand(&base.algebra.atom(b)))
            .collect();
        assert!(check_homomorphism(&base.algebra, &s.algebra, &images)
            .unwrap()
            .is_isomorphism());
    }

    #[test]
    fn witness_shape() {
        let t = witness_term(1, 3).unwrap();
        assert_eq!(
            t,
            meet_all([
                subst(0, 0, cyl_set([1], var("x"))),
                subst(0, 1, cyl_set([1], var("x"))),
                not(diag(0, 1))
            ])
        );
        assert!(witness_term(3, 3).is_err());
    }

    #[test]
    fn witness_vanishes_in_base_and_split() {
        let base = toy();
        assert!(tau_of(&base.algebra, &base.r_element(), 2).is_zero());
        assert!(tau_of(&base.full, &base.r, 2).is_zero());
        let s = split(&base, 3).unwrap();
        assert!(tau_of(&s.algebra, &s.r_element(), 2).is_zero());
        assert!(tau_of(&s.algebra, &s.algebra.zero(), 2).is_zero());
    }

    #[test]
    fn witness_survives_a_larger_u0() {
        let spec = SplitSpec::new(3, vec![3, 2, 2], 1, vec![]).unwrap();
        let base = build_base(&spec).unwrap();
        assert!(!tau_of(&base.full, &base.r, 2).is_zero());
    }

    #[test]
    fn split_not_representable_small_bases() {
        let s = split(&toy(), 3).unwrap();
        let out = representation_search(
            &s.algebra,
            SearchOptions {
                max_base: 4,
                parallel: false,
            },
        )
        .unwrap();
        assert_eq!(out, Representation::Exhausted { max_base: 4 });
    }

    #[test]
    fn blur_blocks() {
        let base = toy();
        let s = split(&base, 3).unwrap();
        assert_eq!(blur(&s, &[]), vec![vec![0, 1, 2]]);
        let g = Element::from_atoms(s.algebra.len(), [s.piece(0, 1), s.piece(1, 2)]);
        let blocks = blur(&s, std::slice::from_ref(&g));
        assert!(blocks.len() <= 4);
        assert_eq!(blocks, vec![vec![0], vec![1], vec![2]]);
        let g = Element::from_atoms(s.algebra.len(), [s.piece(0, 0)]);
        assert_eq!(blur(&s, &[g]), vec![vec![0], vec![1, 2]]);
    }

    #[test]
    fn small_subalgebra_collapses_and_keeps_diagonals() {
        let base = toy();
        let s = split(&base, 3).unwrap();
        let b = small_subalgebra(&s, &[]).unwrap();
        assert_eq!(b.algebra.len(), base.algebra.len());
        for m in &b.members {
            assert!(m.count() == 1 || m.count() == 3);
        }
        for i in 0..3 {
            for j in 0..3 {
                let d = s.algebra.diag(i, j).unwrap();
                assert!(b.members.iter().all(|m| m.le(&d) || m.disjoint(&d)));
            }
        }
    }

    #[test]
    fn real_cells() {
        let base = toy();
        let one = real_partition(&base, 1).unwrap();
        assert_eq!(one, vec![base.r.clone()]);
        let cells = real_partition(&base, 2).unwrap();
        let mut union = base.full.zero();
        for (k, c) in cells.iter().enumerate() {
            assert!(!c.is_zero());
            assert!(union.disjoint(c));
            union.join_with(c);
            for i in 0..3 {
                assert_eq!(
                    base.full.cyl(i, c).unwrap(),
                    base.full.cyl(i, &base.r).unwrap(),
                    "cell {k}"
                );
            }
        }
        assert_eq!(union, base.r);
        assert!(real_partition(&base, 3).is_err());
    }

    #[test]
    fn representable_regime_embeds() {
        let base = toy();
        let s = split(&base, 3).unwrap();
        let g = Element::from_atoms(s.algebra.len(), [s.piece(0, 0)]);
        let b = small_subalgebra(&s, &[g]).unwrap();
        assert_eq!(b.blocks.len(), 2);
        let e = rep_embedding(&base, &b).unwrap();
        assert!(e.witness.is_embedding(), "{:?}", e.witness.failure);
        let trivial = small_subalgebra(&s, &[]).unwrap();
        assert!(rep_embedding(&base, &trivial)
            .unwrap()
            .witness
            .is_embedding());
        let fine = Element::from_atoms(s.algebra.len(), [s.piece(0, 1), s.piece(1, 2)]);
        let too_many = small_subalgebra(&s, &[fine]).unwrap();
        assert!(rep_embedding(&base, &too_many).is_err());
    }

    #[test]
    fn inter_split_embedding() {
        let base = toy();
        let s2 = split(&base, 2).unwrap();
        let s3 = split(&base, 3).unwrap();
        let h = split_embedding(&s2, &s3, &[vec![0], vec![1, 2]]).unwrap();
        assert!(h.is_embedding(), "{:?}", h.failure);
        assert!(!h.surjective);
        let same = split_embedding(&s3, &s3, &[vec![0], vec![1], vec![2]]).unwrap();
        assert!(same.is_isomorphism());
        assert!(split_embedding(&s2, &s3, &[vec![0], vec![1]]).is_err());
        assert!(split_embedding(&s2, &s3, &[vec![0, 1], vec![1, 2]]).is_err());
    }

    #[test]
    fn smaller_group_embeds_in_reduct() {
        let small = build_base(&SplitSpec::new(3, vec![2, 2, 2], 2, vec![]).unwrap()).unwrap();
        let s1 = split(&small, 2).unwrap();
        let s2 = split(&toy(), 2).unwrap();
        let h = split_embedding(&s1, &s2, &[vec![0], vec![1]]).unwrap();
        assert!(h.is_embedding(), "{:?}", h.failure);
        assert!(split_embedding(&s2, &s1, &[vec![0], vec![1]]).is_err());
    }
}

//! Homomorphism checks, isomorphism search and bounded amalgamation.
//!
//! Maps between complete atomic algebras are given on atoms: `images[a]` is
//! the image of atom `a`, and the map extends to all elements by joins.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::atom::AtomId;
use crate::bao::{complex_algebra, FiniteBao};
use crate::dims::ca_frame_correspondents;
use crate::element::Element;
use crate::error::{Error, Result};
use crate::frame::{AtomStructure, Relation};
use crate::ops::{ConstName, UnaryOp};

/// An atom-level map with its verified properties.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MorphismWitness {
    pub images: Vec<Element>,
    pub hom: bool,
    pub injective: bool,
    pub surjective: bool,
    /// Preservation of arbitrary meets; automatic for finite algebras.
    pub complete: bool,
    /// The first failed condition, if any.
    pub failure: Option<String>,
}

impl MorphismWitness {
    pub fn is_embedding(&self) -> bool {
        self.hom && self.injective
    }

    pub fn is_isomorphism(&self) -> bool {
        self.hom && self.injective && self.surjective
    }

    /// Image of an arbitrary element.
    pub fn apply(&self, x: &Element) -> Element {
        apply_map(
            &self.images,
            self.images.first().map_or(0, |e| e.universe()),
            x,
        )
    }
}

fn apply_map(images: &[Element], target: usize, x: &Element) -> Element {
    let mut out = Element::zero(target);
    for a in x.atoms() {
        out.join_with(&images[a]);
    }
    out
}

/// Verifies that the join-extension of `images` is a homomorphism from `a`
/// to `b` for every operation in the signature of `a`.
pub fn check_homomorphism(
    a: &FiniteBao,
    b: &FiniteBao,
    images: &[Element],
) -> Result<MorphismWitness> {
    if images.len() != a.len() {
        return Err(Error::Precondition(format!(
            "map covers {} of {} atoms",
            images.len(),
            a.len()
        )));
    }
    if let Some(e) = images.iter().find(|e| e.universe() != b.len()) {
        return Err(Error::FrameMismatch {
            expected: b.len(),
            found: e.universe(),
        });
    }
    let nb = b.len();
    let h = |x: &Element| apply_map(images, nb, x);
    let mut failure = None;
    let mut fail = |msg: String| {
        if failure.is_none() {
            failure = Some(msg);
        }
    };
    let mut cover = Element::zero(nb);
    for (k, e) in images.iter().enumerate() {
        if !cover.disjoint(e) {
            fail(format!("image of atom {k} overlaps an earlier image"));
        }
        cover.join_with(e);
    }
    if !cover.is_one() {
        fail("images do not cover the unit".into());
    }
    for (op, rel) in a.frame().unary_ops() {
        let target = b
            .relation(op)
            .map_err(|_| Error::Signature(format!("target lacks {op}")))?;
        for (k, img) in images.iter().enumerate() {
            let lhs = h(&rel.apply(&a.atom(k)));
            if lhs != target.apply(img) {
                fail(format!("{op} is not preserved at atom {k}"));
                break;
            }
        }
    }
    for (c, e) in a.frame().constants() {
        let target = b
            .constant(c)
            .map_err(|_| Error::Signature(format!("target lacks {c}")))?;
        if h(e) != target {
            fail(format!("constant {c} is not preserved"));
        }
    }
    if let Some(comp) = a.frame().composition() {
        let tc = b
            .consistency()
            .map_err(|_| Error::Signature("target lacks composition".into()))?;
        'outer: for x in 0..a.len() {
            for y in 0..a.len() {
                if h(comp.compose_atoms(x, y)) != tc.compose(&images[x], &images[y]) {
                    fail(format!("composition is not preserved at atoms ({x}, {y})"));
                    break 'outer;
                }
            }
        }
    }
    let injective = images.iter().all(|e| !e.is_zero());
    let surjective = images.iter().all(|e| e.count() <= 1);
    Ok(MorphismWitness {
        images: images.to_vec(),
        hom: failure.is_none(),
        injective,
        surjective,
        complete: true,
        failure,
    })
}

/// Verifies a map given on all elements; refuses above 16 atoms.
pub fn check_element_map(
    a: &FiniteBao,
    b: &FiniteBao,
    f: impl Fn(&Element) -> Element,
) -> Result<MorphismWitness> {
    if a.len() > 16 {
        return Err(Error::CapExceeded(format!(
            "element map over 2^{} elements",
            a.len()
        )));
    }
    let images: Vec<Element> = (0..a.len()).map(|k| f(&a.atom(k))).collect();
    let mut w = check_homomorphism(a, b, &images)?;
    for x in a.elements()? {
        if f(&x) != w.apply(&x) {
            w.hom = false;
            w.failure
                .get_or_insert_with(|| format!("map is not additive at {x:?}"));
            break;
        }
    }
    Ok(w)
}

#[derive(Clone, Copy, Debug)]
pub struct IsoOptions {
    pub max_atoms: usize,
    /// Colour refinement and individualization; off gives plain backtracking.
    pub prune: bool,
    pub parallel: bool,
}

impl Default for IsoOptions {
    fn default() -> Self {
        IsoOptions {
            max_atoms: 64,
            prune: true,
            parallel: false,
        }
    }
}

/// Finds an isomorphism between the atom structures of `a` and `b`.
pub fn find_isomorphism(a: &FiniteBao, b: &FiniteBao) -> Result<Option<MorphismWitness>> {
    find_isomorphism_with(a, b, IsoOptions::default())
}

pub fn find_isomorphism_with(
    a: &FiniteBao,
    b: &FiniteBao,
    opts: IsoOptions,
) -> Result<Option<MorphismWitness>> {
    for x in [a, b] {
        if x.len() > opts.max_atoms {
            return Err(Error::CapExceeded(format!(
                "{} atoms above the isomorphism cap {}",
                x.len(),
                opts.max_atoms
            )));
        }
    }
    let (fa, fb) = (a.frame(), b.frame());
    let same_sig = fa.signature().dim == fb.signature().dim
        && fa
            .unary_ops()
            .map(|(o, _)| o)
            .eq(fb.unary_ops().map(|(o, _)| o))
        && fa
            .constants()
            .map(|(c, _)| c)
            .eq(fb.constants().map(|(c, _)| c))
        && fa.composition().is_some() == fb.composition().is_some();
    if !same_sig || a.len() != b.len() {
        return Ok(None);
    }
    let g = Joint::new(a, b);
    let found = if opts.prune {
        g.search_refined(opts.parallel)
    } else {
        g.search_plain()
    };
    match found {
        None => Ok(None),
        Some(map) => {
            let images: Vec<Element> = map.iter().map(|&y| Element::atom(b.len(), y)).collect();
            let w = check_homomorphism(a, b, &images)?;
            debug_assert!(w.is_isomorphism());
            Ok(w.is_isomorphism().then_some(w))
        }
    }
}

/// Both frames side by side: nodes `0..n` are atoms of the first, `n..2n` of the second.
struct Joint<'a> {
    n: usize,
    rels: Vec<(&'a Relation, &'a Relation)>,
    /// Per relation, successors and predecessors of each joint node.
    out: Vec<Vec<Vec<u32>>>,
    inc: Vec<Vec<Vec<u32>>>,
    consts: Vec<(&'a Element, &'a Element)>,
    comp: Option<(&'a crate::frame::Consistency, &'a crate::frame::Consistency)>,
}

impl<'a> Joint<'a> {
    fn new(a: &'a FiniteBao, b: &'a FiniteBao) -> Self {
        let n = a.len();
        let rels: Vec<_> = a
            .frame()
            .unary_ops()
            .map(|(op, r)| (r, b.frame().unary(op).expect("same signature")))
            .collect();
        let mut out = Vec::new();
        let mut inc = Vec::new();
        for (ra, rb) in &rels {
            let (wa, wb) = (ra.witnesses(), rb.witnesses());
            let o: Vec<Vec<u32>> = (0..n)
                .map(|v| wa.row(v).to_vec())
                .chain((0..n).map(|v| wb.row(v).iter().map(|&x| x + n as u32).collect()))
                .collect();
            let i: Vec<Vec<u32>> = (0..n)
                .map(|v| ra.image(v).to_vec())
                .chain((0..n).map(|v| rb.image(v).iter().map(|&x| x + n as u32).collect()))
                .collect();
            out.push(o);
            inc.push(i);
        }
        let consts = a
            .frame()
            .constants()
            .map(|(c, e)| (e, b.frame().constant(c).expect("same signature")))
            .collect();
        let comp = a.frame().composition().zip(b.frame().composition());
        Joint {
            n,
            rels,
            out,
            inc,
            consts,
            comp,
        }
    }

    fn initial(&self) -> Vec<u32> {
        let n = self.n;
        let keys: Vec<Vec<u64>> = (0..2 * n)
            .map(|v| {
                let (side, x) = (v / n, v % n);
                let mut k: Vec<u64> = self
                    .consts
                    .iter()
                    .map(|(ea, eb)| {
                        u64::from(if side == 0 {
                            ea.contains(x)
                        } else {
                            eb.contains(x)
                        })
                    })
                    .collect();
                for (ra, rb) in &self.rels {
                    let r = if side == 0 { ra } else { rb };
                    k.push(u64::from(r.contains(x, x)));
                }
                if let Some((ca, cb)) = self.comp {
                    let c = if side == 0 { ca } else { cb };
                    k.push(u64::from(c.is_consistent(x, x, x)));
                }
                k
            })
            .collect();
        relabel(&keys)
    }

    /// Colour refinement to a stable colouring.
    fn refine(&self, mut colour: Vec<u32>) -> Vec<u32> {
        let n = self.n;
        let mut count = distinct(&colour);
        loop {
            let keys: Vec<Vec<u64>> = (0..2 * n)
                .into_par_iter()
                .map(|v| {
                    let mut k = vec![colour[v] as u64];
                    for (o, i) in self.out.iter().zip(&self.inc) {
                        for adj in [&o[v], &i[v]] {
                            let mut cs: Vec<u64> =
                                adj.iter().map(|&x| colour[x as usize] as u64).collect();
                            cs.sort_unstable();
                            k.push(u64::MAX);
                            k.extend(cs);
                        }
                    }
                    if let Some((ca, cb)) = self.comp {
                        let (side, x) = (v / n, v % n);
                        let (c, off) = if side == 0 { (ca, 0) } else { (cb, n) };
                        let mut cs: Vec<u64> = Vec::new();
                        for y in 0..n {
                            for z in c.compose_atoms(x, y).atoms() {
                                cs.push(((colour[y + off] as u64) << 32) | colour[z + off] as u64);
                            }
                        }
                        cs.sort_unstable();
                        k.push(u64::MAX);
                        k.extend(cs);
                    }
                    k
                })
                .collect();
            colour = relabel(&keys);
            let c = distinct(&colour);
            if c == count {
                return colour;
            }
            count = c;
        }
    }

    fn balanced(&self, colour: &[u32]) -> bool {
        let mut hist: HashMap<u32, i64> = HashMap::new();
        for (v, &c) in colour.iter().enumerate() {
            *hist.entry(c).or_default() += if v < self.n { 1 } else { -1 };
        }
        hist.values().all(|&d| d == 0)
    }

    /// Consistency of the partial map with the pair `x ↦ y`.
    fn compatible(&self, map: &[usize], x: usize, y: usize) -> bool {
        for (ra, rb) in &self.rels {
            if ra.contains(x, x) != rb.contains(y, y) {
                return false;
            }
            for (x2, &y2) in map.iter().enumerate() {
                if y2 == usize::MAX {
                    continue;
                }
                if ra.contains(x, x2) != rb.contains(y, y2)
                    || ra.contains(x2, x) != rb.contains(y2, y)
                {
                    return false;
                }
            }
        }
        for (ea, eb) in &self.consts {
            if ea.contains(x) != eb.contains(y) {
                return false;
            }
        }
        if let Some((ca, cb)) = self.comp {
            let mapped: Vec<(usize, usize)> = map
                .iter()
                .enumerate()
                .filter(|(_, &y2)| y2 != usize::MAX)
                .map(|(x2, &y2)| (x2, y2))
                .chain([(x, y)])
                .collect();
            for &(p, q) in &mapped {
                for &(r, s) in &mapped {
                    if ca.is_consistent(x, p, r) != cb.is_consistent(y, q, s)
                        || ca.is_consistent(p, x, r) != cb.is_consistent(q, y, s)
                        || ca.is_consistent(p, r, x) != cb.is_consistent(q, s, y)
                    {
                        return false;
                    }
                }
            }
        }
        true
    }

    fn search_plain(&self) -> Option<Vec<usize>> {
        let mut map = vec![usize::MAX; self.n];
        let mut used = vec![false; self.n];
        self.plain(&mut map, &mut used, 0).then_some(map)
    }

    fn plain(&self, map: &mut [usize], used: &mut [bool], x: usize) -> bool {
        if x == self.n {
            return true;
        }
        for y in 0..self.n {
            if !used[y] && self.compatible(map, x, y) {
                map[x] = y;
                used[y] = true;
                if self.plain(map, used, x + 1) {
                    return true;
                }
                used[y] = false;
                map[x] = usize::MAX;
            }
        }
        false
    }

    fn search_refined(&self, parallel: bool) -> Option<Vec<usize>> {
        let colour = self.refine(self.initial());
        if !self.balanced(&colour) {
            return None;
        }
        let map = vec![usize::MAX; self.n];
        match self.branch(&colour) {
            None => self.finish(&colour, map),
            Some((x, candidates)) => {
                let attempt = |&y: &usize| self.individualize(&colour, x, y, map.clone());
                if parallel {
                    candidates.par_iter().find_map_first(attempt)
                } else {
                    candidates.iter().find_map(attempt)
                }
            }
        }
    }

    /// The first atom of the smallest non-singleton colour class on the first
    /// side, with the second-side atoms of its colour.
    fn branch(&self, colour: &[u32]) -> Option<(usize, Vec<usize>)> {
        let n = self.n;
        let mut size: HashMap<u32, usize> = HashMap::new();
        for &c in &colour[..n] {
            *size.entry(c).or_default() += 1;
        }
        let x = (0..n)
            .filter(|&x| size[&colour[x]] > 1)
            .min_by_key(|&x| (size[&colour[x]], x))?;
        let ys = (0..n).filter(|&y| colour[n + y] == colour[x]).collect();
        Some((x, ys))
    }

    fn individualize(
        &self,
        colour: &[u32],
        x: usize,
        y: usize,
        map: Vec<usize>,
    ) -> Option<Vec<usize>> {
        let fresh = colour.iter().max().map_or(0, |m| m + 1);
        let mut c = colour.to_vec();
        c[x] = fresh;
        c[self.n + y] = fresh;
        let c = self.refine(c);
        if !self.balanced(&c) {
            return None;
        }
        match self.branch(&c) {
            None => self.finish(&c, map),
            Some((x2, candidates)) => candidates
                .into_iter()
                .find_map(|y2| self.individualize(&c, x2, y2, map.clone())),
        }
    }

    /// With a discrete colouring the map is forced; verify it.
    fn finish(&self, colour: &[u32], _map: Vec<usize>) -> Option<Vec<usize>> {
        let n = self.n;
        let mut by_colour: HashMap<u32, usize> = HashMap::new();
        for y in 0..n {
            by_colour.insert(colour[n + y], y);
        }
        let map: Vec<usize> = (0..n).map(|x| by_colour[&colour[x]]).collect();
        let mut partial = vec![usize::MAX; n];
        for x in 0..n {
            if !self.compatible(&partial, x, map[x]) {
                return None;
            }
            partial[x] = map[x];
        }
        Some(map)
    }
}

fn distinct(colour: &[u32]) -> usize {
    let mut c = colour.to_vec();
    c.sort_unstable();
    c.dedup();
    c.len()
}

/// Renumbers keys by their sorted order so colours are comparable across sides.
fn relabel(keys: &[Vec<u64>]) -> Vec<u32> {
    let mut sorted: Vec<&Vec<u64>> = keys.iter().collect();
    sorted.sort_unstable();
    sorted.dedup();
    let index: HashMap<&Vec<u64>, u32> = sorted
        .into_iter()
        .enumerate()
        .map(|(k, v)| (v, k as u32))
        .collect();
    keys.iter().map(|k| index[k]).collect()
}

/// A verified map between two algebras.
#[derive(Clone, Debug)]
pub struct Arrow {
    pub from: FiniteBao,
    pub to: FiniteBao,
    pub images: Vec<Element>,
}

impl Arrow {
    pub fn new(from: FiniteBao, to: FiniteBao, images: Vec<Element>) -> Self {
        Arrow { from, to, images }
    }

    pub fn identity(a: &FiniteBao) -> Self {
        Arrow {
            from: a.clone(),
            to: a.clone(),
            images: (0..a.len()).map(|k| a.atom(k)).collect(),
        }
    }

    pub fn witness(&self) -> Result<MorphismWitness> {
        check_homomorphism(&self.from, &self.to, &self.images)
    }

    pub fn apply(&self, x: &Element) -> Element {
        apply_map(&self.images, self.to.len(), x)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AmalgamReport {
    pub amalgam: bool,
    pub superamalgam: bool,
    /// For a failed interpolation: `(j, x, y)` with `x ∈ A_j`, `y` in the other
    /// algebra, `m_j(x) ≤ m_k(y)` and no interpolant.
    pub witness: Option<(usize, Element, Element)>,
    pub detail: Option<String>,
}

/// Cap on `|A_1| · |A_2|` element pairs for the interpolation check.
pub const SUPAP_PAIR_CAP: u128 = 1 << 12;

/// Checks that `m1, m2` amalgamate the span `i1, i2` and whether the
/// amalgam is a superamalgam.
pub fn amalgam_check(i1: &Arrow, i2: &Arrow, m1: &Arrow, m2: &Arrow) -> Result<AmalgamReport> {
    for (name, f) in [("i1", i1), ("i2", i2), ("m1", m1), ("m2", m2)] {
        if !f.witness()?.hom {
            return Err(Error::Precondition(format!("{name} is not a homomorphism")));
        }
    }
    let fail = |d: &str| {
        Ok(AmalgamReport {
            amalgam: false,
            superamalgam: false,
            witness: None,
            detail: Some(d.into()),
        })
    };
    if !i1.witness()?.injective || !i2.witness()?.injective {
        return fail("the span maps are not injective");
    }
    if !m1.witness()?.injective || !m2.witness()?.injective {
        return fail("m1 or m2 is not injective");
    }
    let a0 = i1.from.len();
    for k in 0..a0 {
        let x = i1.from.atom(k);
        if m1.apply(&i1.apply(&x)) != m2.apply(&i2.apply(&x)) {
            return fail("m1 ∘ i1 and m2 ∘ i2 differ");
        }
    }
    let (n1, n2) = (i1.to.len(), i2.to.len());
    let pairs = 1u128.checked_shl((n1 + n2) as u32).unwrap_or(u128::MAX);
    if pairs > SUPAP_PAIR_CAP {
        return Err(Error::CapExceeded(format!(
            "2^{} element pairs above {SUPAP_PAIR_CAP}",
            n1 + n2
        )));
    }
    // For x ∈ A_j the least candidate is z = {a : i_j(a) meets x}; it works for
    // every y above x iff i_k(z) lies below the least such y.
    let sides = [(i1, m1, i2, m2), (i2, m2, i1, m1)];
    for (j, (ij, mj, ik, mk)) in sides.into_iter().enumerate() {
        for x in ij.to.elements()? {
            let z = Element::from_atoms(a0, (0..a0).filter(|&a| !ij.images[a].disjoint(&x)));
            let mx = mj.apply(&x);
            let y_min = Element::from_atoms(
                ik.to.len(),
                (0..ik.to.len()).filter(|&b| !mk.images[b].disjoint(&mx)),
            );
            if !ik.apply(&z).le(&y_min) {
                return Ok(AmalgamReport {
                    amalgam: true,
                    superamalgam: false,
                    witness: Some((j + 1, x, y_min)),
                    detail: None,
                });
            }
        }
    }
    Ok(AmalgamReport {
        amalgam: true,
        superamalgam: true,
        witness: None,
        detail: None,
    })
}

/// Where `amalgam_search` looks for the amalgam.
#[derive(Clone, Debug)]
pub enum Candidates {
    Pool(Vec<FiniteBao>),
    /// Every two-dimensional cylindric frame with at most this many atoms.
    Ca2Frames(usize),
}

#[derive(Clone, Debug)]
pub enum AmalgamSearch {
    Found {
        d: FiniteBao,
        m1: Arrow,
        m2: Arrow,
        report: AmalgamReport,
    },
    Exhausted {
        candidates: usize,
    },
}

pub const AMALGAM_ATOM_CAP: usize = 6;

/// Searches the candidates for an amalgam of the span `i1, i2`.
pub fn amalgam_search(i1: &Arrow, i2: &Arrow, candidates: &Candidates) -> Result<AmalgamSearch> {
    let pool: Vec<FiniteBao> = match candidates {
        Candidates::Pool(p) => p.clone(),
        Candidates::Ca2Frames(bound) => {
            if *bound > AMALGAM_ATOM_CAP {
                return Err(Error::CapExceeded(format!(
                    "bound {bound} above {AMALGAM_ATOM_CAP}"
                )));
            }
            ca2_frames(*bound)?
        }
    };
    for d in &pool {
        if d.len() > AMALGAM_ATOM_CAP {
            return Err(Error::CapExceeded(format!(
                "candidate with {} atoms",
                d.len()
            )));
        }
    }
    let count = pool.len();
    for d in pool {
        let e1 = embeddings(&i1.to, &d)?;
        if e1.is_empty() {
            continue;
        }
        let e2 = embeddings(&i2.to, &d)?;
        for f1 in &e1 {
            for f2 in &e2 {
                let m1 = Arrow::new(i1.to.clone(), d.clone(), f1.clone());
                let m2 = Arrow::new(i2.to.clone(), d.clone(), f2.clone());
                let report = amalgam_check(i1, i2, &m1, &m2)?;
                if report.amalgam {
                    return Ok(AmalgamSearch::Found { d, m1, m2, report });
                }
            }
        }
    }
    Ok(AmalgamSearch::Exhausted { candidates: count })
}

/// Every embedding of `a` into `d`, by assigning each atom of `d` to the atom
/// of `a` whose image contains it.
pub fn embeddings(a: &FiniteBao, d: &FiniteBao) -> Result<Vec<Vec<Element>>> {
    let (na, nd) = (a.len(), d.len());
    if nd > AMALGAM_ATOM_CAP {
        return Err(Error::CapExceeded(format!(
            "{nd} atoms above {AMALGAM_ATOM_CAP}"
        )));
    }
    if na > nd || na == 0 {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    let total = na.pow(nd as u32);
    for mut code in 0..total {
        let mut images = vec![Element::zero(nd); na];
        for b in 0..nd {
            images[code % na].insert(b);
            code /= na;
        }
        if images.iter().any(Element::is_zero) {
            continue;
        }
        let w = check_homomorphism(a, d, &images);
        if matches!(w, Ok(ref w) if w.hom) {
            out.push(images);
        }
    }
    Ok(out)
}

/// All frames for `CA_2` with at most `bound` atoms: two commuting
/// equivalence relations and a diagonal satisfying the cylindric frame
/// conditions. Isomorphic copies are not removed.
pub fn ca2_frames(bound: usize) -> Result<Vec<FiniteBao>> {
    let mut out = Vec::new();
    for n in 1..=bound {
        let parts = partitions(n);
        for p0 in &parts {
            for p1 in &parts {
                for mask in 0u64..1 << n {
                    let d = Element::from_mask(n, mask);
                    let mut b = AtomStructure::builder((0..n).map(AtomId::Index).collect(), 2)
                        .unary(UnaryOp::Cyl(0), Relation::from_classes(p0.clone()))
                        .unary(UnaryOp::Cyl(1), Relation::from_classes(p1.clone()));
                    for i in 0..2 {
                        b = b.constant(ConstName::Diag(i, i), Element::one(n));
                    }
                    b = b
                        .constant(ConstName::Diag(0, 1), d.clone())
                        .constant(ConstName::Diag(1, 0), d);
                    let f = b.build()?;
                    if ca_frame_correspondents(&f, 2)?.holds() {
                        out.push(complex_algebra(f));
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Set partitions of `0..n` as restricted growth strings.
fn partitions(n: usize) -> Vec<Vec<u32>> {
    fn go(k: usize, n: usize, cur: &mut Vec<u32>, max: u32, out: &mut Vec<Vec<u32>>) {
        if k == n {
            out.push(cur.clone());
            return;
        }
        for c in 0..=max + 1 {
            if k == 0 && c > 0 {
                break;
            }
            cur.push(c);
            go(k + 1, n, cur, max.max(c), out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        return vec![vec![]];
    }
    let mut cur = vec![0];
    go(1, n, &mut cur, 0, &mut out);
    out
}

//! Set algebras over finite bases and bounded representation search.

use rayon::prelude::*;
use serde::Serialize;

use crate::atom::AtomId;
use crate::bao::{complex_algebra, FiniteBao};
use crate::element::Element;
use crate::error::{Error, Result};
use crate::frame::{AtomStructure, Relation};
use crate::ops::{ConstName, UnaryOp};

/// Largest number of tuples a full set algebra may have.
pub const TUPLE_CAP: usize = 1 << 20;

/// The tuples of `^n u` in lexicographic order.
pub fn tuples(n: usize, u: usize) -> Result<Vec<Vec<usize>>> {
    let count = u.checked_pow(n as u32).filter(|&c| c <= TUPLE_CAP);
    let Some(count) = count else {
        return Err(Error::CapExceeded(format!(
            "{u}^{n} tuples exceed {TUPLE_CAP}"
        )));
    };
    Ok((0..count)
        .map(|mut code| {
            let mut t = vec![0; n];
            for k in (0..n).rev() {
                t[k] = code % u;
                code /= u;
            }
            t
        })
        .collect())
}

/// Position of a tuple in the order of [`tuples`].
pub fn tuple_index(t: &[usize], u: usize) -> usize {
    t.iter().fold(0, |acc, &v| acc * u + v)
}

/// The element of a tuple-indexed algebra with the given tuples.
pub fn tuple_element(a: &FiniteBao, ts: &[Vec<usize>]) -> Element {
    let n = a.dim();
    let u = (a.len() as f64).powf(1.0 / n as f64).round() as usize;
    Element::from_atoms(a.len(), ts.iter().map(|t| tuple_index(t, u)))
}

fn check_transformation(n: usize, t: &[usize]) -> Result<()> {
    if t.len() != n {
        return Err(Error::Parameter(format!(
            "transformation {t:?} is not a map on {n}"
        )));
    }
    if let Some(&v) = t.iter().find(|&&v| v >= n) {
        return Err(Error::IndexOutOfRange { index: v, bound: n });
    }
    Ok(())
}

/// The image list of a substitution operator.
pub fn transformation(n: usize, op: &UnaryOp) -> Result<Vec<usize>> {
    match op {
        UnaryOp::Swap(i, j) => {
            if *i >= n || *j >= n {
                return Err(Error::IndexOutOfRange {
                    index: (*i).max(*j),
                    bound: n,
                });
            }
            let mut t: Vec<usize> = (0..n).collect();
            t.swap(*i, *j);
            Ok(t)
        }
        UnaryOp::Subst(t) => {
            check_transformation(n, t)?;
            Ok(t.clone())
        }
        other => Err(Error::Parameter(format!("{other} is not a substitution"))),
    }
}

/// The full set algebra on `^n u` with cylindrifiers, diagonals and the
/// substitutions `s_τ X = {s : s∘τ ∈ X}` listed in `subs`.
pub fn full_set_algebra(n: usize, u: usize, subs: &[UnaryOp]) -> Result<FiniteBao> {
    Ok(complex_algebra(full_set_frame(n, u, subs)?))
}

pub fn full_set_frame(n: usize, u: usize, subs: &[UnaryOp]) -> Result<AtomStructure> {
    if u == 0 {
        return Err(Error::Parameter("the base must be nonempty".into()));
    }
    let ts = tuples(n, u)?;
    let count = ts.len();
    let mut b = AtomStructure::builder(ts.iter().cloned().map(AtomId::Tuple).collect(), n);
    for i in 0..n {
        let keys = ts.iter().map(|t| {
            let mut k = t.clone();
            k[i] = usize::MAX;
            k
        });
        b = b.unary(UnaryOp::Cyl(i), Relation::from_keys(keys));
        for j in 0..n {
            b = b.constant(
                ConstName::Diag(i, j),
                Element::from_atoms(count, (0..count).filter(|&k| ts[k][i] == ts[k][j])),
            );
        }
    }
    for op in subs {
        let tau = transformation(n, op)?;
        let pairs = ts.iter().enumerate().map(|(a, s)| {
            let st: Vec<usize> = tau.iter().map(|&k| s[k]).collect();
            (a, tuple_index(&st, u))
        });
        b = b.unary(op.clone(), Relation::from_pairs(count, pairs).normalized());
    }
    b.build()
}

/// A base `⟨U; R⟩` for directed set algebras.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, serde::Deserialize)]
pub struct DirectedBase {
    pub size: usize,
    pub rel: Vec<(usize, usize)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct BaseClass {
    pub weak_p: bool,
    pub p_structure: bool,
    pub extensional: bool,
}

impl DirectedBase {
    pub fn total(size: usize) -> Self {
        DirectedBase {
            size,
            rel: (0..size)
                .flat_map(|x| (0..size).map(move |y| (x, y)))
                .collect(),
        }
    }

    fn matrix(&self) -> Result<Vec<Vec<bool>>> {
        let mut m = vec![vec![false; self.size]; self.size];
        for &(x, y) in &self.rel {
            if x >= self.size || y >= self.size {
                return Err(Error::IndexOutOfRange {
                    index: x.max(y),
                    bound: self.size,
                });
            }
            m[x][y] = true;
        }
        Ok(m)
    }

    pub fn classify(&self) -> Result<BaseClass> {
        let r = self.matrix()?;
        let u = self.size;
        let weak_p = (0..u).all(|x| (0..u).all(|y| (0..u).any(|z| r[x][z] && r[y][z])));
        let p_structure = (0..u)
            .all(|x| (0..u).all(|y| (0..u).any(|z| (0..u).all(|w| r[w][z] == (w == x || w == y)))));
        let extensional =
            (0..u).all(|x| (0..u).all(|y| x == y || (0..u).any(|z| r[z][x] != r[z][y])));
        Ok(BaseClass {
            weak_p,
            p_structure,
            extensional,
        })
    }
}

pub fn classify_base(base: &DirectedBase) -> Result<BaseClass> {
    base.classify()
}

/// The full w-directed cylindric set algebra of dimension `alpha`: operators
/// `cu_i` (`C_i^↑`), `cd_i` (`C_i^↓`) and diagonals.
pub fn directed_set_algebra(alpha: usize, base: &DirectedBase) -> Result<FiniteBao> {
    let r = base.matrix()?;
    if !base.classify()?.weak_p {
        return Err(Error::Precondition(
            "the base is not a weak P-structure".into(),
        ));
    }
    let u = base.size;
    let ts = tuples(alpha, u)?;
    let count = ts.len();
    let mut b = AtomStructure::builder(ts.iter().cloned().map(AtomId::Tuple).collect(), alpha);
    for i in 0..alpha {
        let mut up = Vec::new();
        let mut down = Vec::new();
        for (si, s) in ts.iter().enumerate() {
            let mut z = s.clone();
            for (v, row) in r.iter().enumerate().take(u) {
                z[i] = v;
                let zi = tuple_index(&z, u);
                // s ∈ C↑(X) when some z ∈ X has R(z_i, s_i)
                if row[s[i]] {
                    up.push((si, zi));
                }
                if r[s[i]][v] {
                    down.push((si, zi));
                }
            }
        }
        b = b.unary(
            UnaryOp::CylUp(i),
            Relation::from_pairs(count, up).normalized(),
        );
        b = b.unary(
            UnaryOp::CylDown(i),
            Relation::from_pairs(count, down).normalized(),
        );
        for j in 0..alpha {
            b = b.constant(
                ConstName::Diag(i, j),
                Element::from_atoms(count, (0..count).filter(|&k| ts[k][i] == ts[k][j])),
            );
        }
    }
    Ok(complex_algebra(b.build()?))
}

/// Result of a bounded representation search.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "outcome")]
pub enum Representation {
    /// `images[a]` is the set of tuples of `^dim base` representing atom `a`.
    Found { base: usize, images: Vec<Element> },
    /// No representation with a base of size at most `max_base`.
    Exhausted { max_base: usize },
}

#[derive(Clone, Copy, Debug)]
pub struct SearchOptions {
    pub max_base: usize,
    pub parallel: bool,
}

pub const MAX_BASE_CAP: usize = 6;
pub const MAX_DIM: usize = 3;

/// Searches for an embedding of the cylindric reduct of `a` into a full
/// cylindric set algebra with base of size `1..=max_base`.
///
/// A labelling of `^n k` by atoms is a representation iff it respects the
/// diagonals, every atom is used, and along every `i`-line the labels are
/// pairwise `T_i`-related and include every `T_i`-successor of each label.
pub fn representation_search(a: &FiniteBao, opts: SearchOptions) -> Result<Representation> {
    let n = a.dim();
    if n == 0 || n > MAX_DIM {
        return Err(Error::Parameter(format!(
            "dimension {n} outside 1..={MAX_DIM}"
        )));
    }
    if opts.max_base > MAX_BASE_CAP {
        return Err(Error::CapExceeded(format!(
            "max base {} above {MAX_BASE_CAP}",
            opts.max_base
        )));
    }
    let rels = (0..n)
        .map(|i| a.relation(&UnaryOp::Cyl(i)).cloned())
        .collect::<Result<Vec<Relation>>>()?;
    let diags = (0..n)
        .map(|i| (0..n).map(|j| a.diag(i, j)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    for k in 1..=opts.max_base {
        if let Some(images) = Search::new(a, &rels, &diags, k)?.and_then(|s| s.run(opts.parallel)) {
            return Ok(Representation::Found { base: k, images });
        }
    }
    Ok(Representation::Exhausted {
        max_base: opts.max_base,
    })
}

struct Search {
    atoms: usize,
    base: usize,
    tuples: Vec<Vec<usize>>,
    /// candidate labels per tuple, from the diagonal pattern
    domain: Vec<Vec<u16>>,
    /// `lines[s][i]`: the tuples of the `i`-line through `s`
    lines: Vec<Vec<Vec<usize>>>,
    related: Vec<Vec<bool>>,
    succ: Vec<Vec<Vec<u16>>>,
    /// tuples with all coordinates equal, other than the first
    diagonal: Vec<usize>,
}

impl Search {
    fn new(
        a: &FiniteBao,
        rels: &[Relation],
        diags: &[Vec<Element>],
        k: usize,
    ) -> Result<Option<Self>> {
        let n = a.dim();
        let atoms = a.len();
        let tuples = tuples(n, k)?;
        if atoms > tuples.len() {
            return Ok(None);
        }
        // every T_i-successor set appears inside one line of k tuples
        for rel in rels {
            if (0..atoms).any(|b| rel.witnesses().row(b).len() > k) {
                return Ok(None);
            }
        }
        let domain: Vec<Vec<u16>> = tuples
            .iter()
            .map(|t| {
                (0..atoms)
                    .filter(|&x| {
                        (0..n).all(|i| (0..n).all(|j| diags[i][j].contains(x) == (t[i] == t[j])))
                    })
                    .map(|x| x as u16)
                    .collect()
            })
            .collect();
        if domain.iter().any(Vec::is_empty) {
            return Ok(None);
        }
        let lines = tuples
            .iter()
            .map(|t| {
                (0..n)
                    .map(|i| {
                        (0..k)
                            .map(|v| {
                                let mut s = t.clone();
                                s[i] = v;
                                tuple_index(&s, k)
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        let related = (0..n)
            .map(|i| {
                (0..atoms * atoms)
                    .map(|p| rels[i].contains(p / atoms, p % atoms))
                    .collect()
            })
            .collect();
        let succ = rels
            .iter()
            .map(|r| {
                let w = r.witnesses();
                (0..atoms)
                    .map(|x| w.row(x).iter().map(|&y| y as u16).collect())
                    .collect()
            })
            .collect();
        let diagonal = (1..k).map(|v| tuple_index(&vec![v; n], k)).collect();
        Ok(Some(Search {
            atoms,
            base: k,
            tuples,
            domain,
            lines,
            related,
            succ,
            diagonal,
        }))
    }

    fn run(self, parallel: bool) -> Option<Vec<Element>> {
        let s = &self;
        let first = s.domain[0].clone();
        let attempt = |&x: &u16| {
            let mut labels = vec![u16::MAX; s.tuples.len()];
            labels[0] = x;
            s.consistent(&labels, 0).then_some(())?;
            s.dfs(&mut labels, 1).then(|| s.images(&labels))
        };
        if parallel {
            first.par_iter().find_map_first(attempt)
        } else {
            first.iter().find_map(attempt)
        }
    }

    fn images(&self, labels: &[u16]) -> Vec<Element> {
        let mut out = vec![Element::zero(self.tuples.len()); self.atoms];
        for (t, &x) in labels.iter().enumerate() {
            out[x as usize].insert(t);
        }
        out
    }

    fn dfs(&self, labels: &mut [u16], pos: usize) -> bool {
        if pos == labels.len() {
            let mut used = vec![false; self.atoms];
            for &x in labels.iter() {
                used[x as usize] = true;
            }
            return used.into_iter().all(|u| u);
        }
        for &x in &self.domain[pos] {
            // symmetry: the constant tuple 0…0 carries the least label among constant tuples
            if self.diagonal.contains(&pos) && x < labels[0] {
                continue;
            }
            labels[pos] = x;
            if self.consistent(labels, pos) && self.dfs(labels, pos + 1) {
                return true;
            }
        }
        labels[pos] = u16::MAX;
        false
    }

    /// Checks the lines through `pos` after labelling it.
    fn consistent(&self, labels: &[u16], pos: usize) -> bool {
        let x = labels[pos] as usize;
        for (i, line) in self.lines[pos].iter().enumerate() {
            let rel = &self.related[i];
            let mut free = 0;
            let mut present = Vec::with_capacity(self.base);
            for &t in line {
                let y = labels[t];
                if y == u16::MAX {
                    free += 1;
                    continue;
                }
                let y = y as usize;
                if !rel[x * self.atoms + y] || !rel[y * self.atoms + x] {
                    return false;
                }
                present.push(y as u16);
            }
            let mut missing = 0;
            let mut required: Vec<u16> = Vec::new();
            for &y in &present {
                for &z in &self.succ[i][y as usize] {
                    if !present.contains(&z) && !required.contains(&z) {
                        required.push(z);
                        missing += 1;
                    }
                }
            }
            if missing > free {
                return false;
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::{ca_axioms, check_variety, CheckMode};

    #[test]
    fn cylindrification_of_a_point() {
        let a = full_set_algebra(3, 2, &[]).unwrap();
        let x = tuple_element(&a, &[vec![0, 0, 0]]);
        assert_eq!(
            a.cyl(0, &x).unwrap(),
            tuple_element(&a, &[vec![0, 0, 0], vec![1, 0, 0]])
        );
        assert_eq!(a.diag(0, 1).unwrap().count(), 4);
    }

    #[test]
    fn swap_fixes_its_diagonal() {
        let a = full_set_algebra(3, 2, &[UnaryOp::Swap(0, 1)]).unwrap();
        let d = a.diag(0, 1).unwrap();
        assert_eq!(a.apply(&UnaryOp::Swap(0, 1), &d).unwrap(), d);
    }

    #[test]
    fn small_set_algebras_are_cylindric() {
        for (n, u) in [(2, 2), (3, 2), (2, 3)] {
            let a = full_set_algebra(n, u, &[]).unwrap();
            let r = check_variety(&a, &ca_axioms(n), CheckMode::Exhaustive { cap: 1 << 20 });
            match r {
                Ok(r) => assert!(r.holds()),
                Err(Error::CapExceeded(_)) => {}
                Err(e) => panic!("{e}"),
            }
        }
    }

    #[test]
    fn classification() {
        let one = DirectedBase {
            size: 1,
            rel: vec![(0, 0)],
        };
        assert_eq!(
            classify_base(&one).unwrap(),
            BaseClass {
                weak_p: true,
                p_structure: true,
                extensional: true
            }
        );
        let c = classify_base(&DirectedBase::total(2)).unwrap();
        assert!(c.weak_p && !c.p_structure);
        assert!(
            !classify_base(&DirectedBase {
                size: 2,
                rel: vec![]
            })
            .unwrap()
            .weak_p
        );
    }

    #[test]
    fn set_algebra_represents_itself() {
        let a = full_set_algebra(2, 2, &[]).unwrap();
        for parallel in [false, true] {
            match representation_search(
                &a,
                SearchOptions {
                    max_base: 3,
                    parallel,
                },
            )
            .unwrap()
            {
                Representation::Found { base, images } => {
                    assert_eq!(base, 2);
                    assert!(images.iter().all(|e| e.count() == 1));
                }
                other => panic!("{other:?}"),
            }
        }
    }
}

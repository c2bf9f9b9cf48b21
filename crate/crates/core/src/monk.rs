//! Monk's atom structures `G(m, n)` and their complex algebras `C(m, n)`.
//!
//! An atom is a pair `(R, f)`: `R` is an equivalence relation on `m` and `f`
//! colours the pairs of `R`-inequivalent indices with colours below `n`, is
//! symmetric, is constant on `R`-classes and leaves no triangle of three
//! distinct classes with a single colour.

use std::collections::HashMap;

use crate::atom::AtomId;
use crate::bao::{complex_algebra, FiniteBao};
use crate::element::Element;
use crate::error::{Error, Result};
use crate::frame::{AtomStructure, Relation};
use crate::ops::{ConstName, UnaryOp};

pub const MAX_M: usize = 4;
pub const MAX_N: usize = 5;

/// A Monk atom with the colouring stored per class pair.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MonkAtom {
    /// Restricted-growth string: `partition[κ]` is the class of `κ`.
    pub partition: Vec<usize>,
    /// `colour[a][b]` for classes `a ≠ b`; the diagonal is unused.
    pub colour: Vec<Vec<usize>>,
}

impl MonkAtom {
    pub fn m(&self) -> usize {
        self.partition.len()
    }

    pub fn related(&self, k: usize, l: usize) -> bool {
        self.partition[k] == self.partition[l]
    }

    /// `f_κλ`, or `None` when `κ R λ`.
    pub fn f(&self, k: usize, l: usize) -> Option<usize> {
        let (a, b) = (self.partition[k], self.partition[l]);
        (a != b).then(|| self.colour[a][b])
    }

    pub fn id(&self) -> AtomId {
        let m = self.m();
        let colours = (0..m)
            .flat_map(|k| (k + 1..m).map(move |l| (k, l)))
            .filter_map(|(k, l)| self.f(k, l).map(|c| (k, l, c)))
            .collect();
        AtomId::Monk {
            partition: self.partition.clone(),
            colours,
        }
    }

    /// The atom `(σRσ, f∘σ)` for a permutation `σ` of the indices.
    pub fn permute(&self, sigma: &[usize]) -> MonkAtom {
        let m = self.m();
        let moved: Vec<usize> = (0..m).map(|k| self.partition[sigma[k]]).collect();
        let (partition, renumber) = canonical(&moved);
        let blocks = renumber.len();
        let mut colour = vec![vec![0; blocks]; blocks];
        for k in 0..m {
            for l in 0..m {
                if let Some(c) = self.f(sigma[k], sigma[l]) {
                    colour[partition[k]][partition[l]] = c;
                }
            }
        }
        MonkAtom { partition, colour }
    }

    /// Key for `T_κ`: everything the atom says about indices other than `κ`.
    fn key_without(&self, kappa: usize) -> (Vec<usize>, Vec<Option<usize>>) {
        let m = self.m();
        let rest: Vec<usize> = (0..m).filter(|&k| k != kappa).collect();
        let (partition, _) =
            canonical(&rest.iter().map(|&k| self.partition[k]).collect::<Vec<_>>());
        let colours = rest
            .iter()
            .flat_map(|&k| rest.iter().map(move |&l| (k, l)))
            .map(|(k, l)| self.f(k, l))
            .collect();
        (partition, colours)
    }
}

/// Renumbers class labels in order of first appearance; also returns the
/// old labels in new order.
fn canonical(labels: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let mut order: Vec<usize> = Vec::new();
    let rgs = labels
        .iter()
        .map(|&c| match order.iter().position(|&o| o == c) {
            Some(p) => p,
            None => {
                order.push(c);
                order.len() - 1
            }
        })
        .collect();
    (rgs, order)
}

/// Set partitions of `0..m` as restricted-growth strings, in lexicographic order.
pub fn partitions(m: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(m);
    fn go(m: usize, cur: &mut Vec<usize>, blocks: usize, out: &mut Vec<Vec<usize>>) {
        if cur.len() == m {
            out.push(cur.clone());
            return;
        }
        for c in 0..=blocks {
            cur.push(c);
            go(m, cur, blocks.max(c + 1), out);
            cur.pop();
        }
    }
    go(m, &mut cur, 0, &mut out);
    out
}

fn check_params(m: usize, n: usize) -> Result<()> {
    if !(3..=MAX_M).contains(&m) {
        return Err(Error::Parameter(format!("m = {m} outside 3..={MAX_M}")));
    }
    if n + 1 < m || n > MAX_N {
        return Err(Error::Parameter(format!(
            "n = {n} outside {}..={MAX_N}",
            m - 1
        )));
    }
    Ok(())
}

/// All atoms of `G(m, n)`: partitions in lexicographic order, then colourings
/// of class pairs in lexicographic order.
pub fn monk_atoms(m: usize, n: usize) -> Result<Vec<MonkAtom>> {
    check_params(m, n)?;
    let mut out = Vec::new();
    for partition in partitions(m) {
        let b = partition.iter().max().map_or(0, |&x| x + 1);
        let pairs: Vec<(usize, usize)> = (0..b)
            .flat_map(|x| (x + 1..b).map(move |y| (x, y)))
            .collect();
        let total = n.pow(pairs.len() as u32);
        for code in 0..total {
            let mut colour = vec![vec![0; b]; b];
            let mut c = code;
            for &(x, y) in pairs.iter().rev() {
                colour[x][y] = c % n;
                colour[y][x] = c % n;
                c /= n;
            }
            let mono = (0..b).any(|x| {
                (x + 1..b).any(|y| {
                    (y + 1..b).any(|z| colour[x][y] == colour[x][z] && colour[x][z] == colour[y][z])
                })
            });
            if !mono {
                out.push(MonkAtom {
                    partition: partition.clone(),
                    colour,
                });
            }
        }
    }
    Ok(out)
}

/// `G(m, n)` with `T_κ` and `E_κλ` for `κ, λ < m`.
pub fn monk_structure(m: usize, n: usize) -> Result<AtomStructure> {
    let atoms = monk_atoms(m, n)?;
    build(&atoms, m, false)
}

/// `G(m, n)` with the transposition relations `≡_ij` as operators `p_ij`.
pub fn johnson_extension(m: usize, n: usize) -> Result<AtomStructure> {
    let atoms = monk_atoms(m, n)?;
    build(&atoms, m, true)
}

fn build(atoms: &[MonkAtom], m: usize, swaps: bool) -> Result<AtomStructure> {
    let count = atoms.len();
    let mut b = AtomStructure::builder(atoms.iter().map(MonkAtom::id).collect(), m);
    for k in 0..m {
        b = b.unary(
            UnaryOp::Cyl(k),
            Relation::from_keys(atoms.iter().map(|a| a.key_without(k))),
        );
        for l in 0..m {
            b = b.constant(
                ConstName::Diag(k, l),
                Element::from_atoms(count, (0..count).filter(|&a| atoms[a].related(k, l))),
            );
        }
    }
    if swaps {
        let index: HashMap<&MonkAtom, usize> =
            atoms.iter().enumerate().map(|(k, a)| (a, k)).collect();
        for i in 0..m {
            for j in i + 1..m {
                let mut sigma: Vec<usize> = (0..m).collect();
                sigma.swap(i, j);
                let image: Vec<usize> = atoms.iter().map(|a| index[&a.permute(&sigma)]).collect();
                b = b.unary(UnaryOp::Swap(i, j), Relation::from_function(&image));
            }
        }
    }
    b.build()
}

/// `C(m, n) = Ca(G(m, n))`.
pub fn monk_algebra(m: usize, n: usize) -> Result<FiniteBao> {
    Ok(complex_algebra(monk_structure(m, n)?))
}

/// The element `x` of `C(n, n+k)` whose relativization, restricted to the
/// first `m` indices, is a copy of `C(m, m+k)`: indices `μ ≥ m` are
/// singletons and `f(μ, v) = μ + k` for `v < μ`.
pub fn monk_x_element(m: usize, n: usize, k: usize) -> Result<(FiniteBao, Element)> {
    if m > n {
        return Err(Error::Parameter(format!("m = {m} exceeds n = {n}")));
    }
    let atoms = monk_atoms(n, n + k)?;
    let x = Element::from_atoms(
        atoms.len(),
        (0..atoms.len()).filter(|&a| in_x(&atoms[a], m, k)),
    );
    Ok((complex_algebra(build(&atoms, n, false)?), x))
}

/// Membership in `x` for an atom of `G(n, n+k)`.
pub fn in_x(a: &MonkAtom, m: usize, k: usize) -> bool {
    let n = a.m();
    (m..n).all(|mu| {
        (0..n).all(|v| v == mu || !a.related(mu, v)) && (0..mu).all(|v| a.f(mu, v) == Some(mu + k))
    })
}

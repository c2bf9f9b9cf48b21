//! Hypernetworks over a finite relation algebra.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::bao::FiniteBao;
use crate::error::{Error, Result};
use crate::ops::{ConstName, UnaryOp};

pub const MAX_NODES: usize = 4;
pub const MAX_ATOMS: usize = 16;
/// Largest number of hypernetworks an enumeration may produce.
pub const NETWORK_CAP: usize = 4_000_000;

/// Node count `m`, width `n` and hyperlabel count `|Λ|`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Shape {
    pub nodes: usize,
    pub width: usize,
    pub lambda: usize,
}

impl Shape {
    /// The tuples of `^{≤width} nodes` of length other than 2, shortest first
    /// and lexicographic within a length.
    pub fn hyper_tuples(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        for len in (0..=self.width).filter(|&l| l != 2) {
            let count = self.nodes.pow(len as u32);
            for mut code in 0..count {
                let mut t = vec![0; len];
                for slot in t.iter_mut().rev() {
                    *slot = code % self.nodes;
                    code /= self.nodes;
                }
                out.push(t);
            }
        }
        out
    }
}

/// A hypernetwork: atom labels on node pairs and, when `|Λ| > 1`, a
/// hyperlabel for every tuple of [`Shape::hyper_tuples`]. With a single
/// hyperlabel the vector is empty.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Hypernetwork {
    pub nodes: usize,
    /// `labels[x * nodes + y] = N(x, y)` as an atom index.
    pub labels: Vec<u16>,
    pub hyper: Vec<u16>,
}

impl Hypernetwork {
    pub fn label(&self, x: usize, y: usize) -> usize {
        self.labels[x * self.nodes + y] as usize
    }
}

/// A set of hypernetworks of one shape over one algebra.
#[derive(Clone, Debug)]
pub struct NetworkSet {
    pub algebra: FiniteBao,
    pub shape: Shape,
    pub networks: Vec<Hypernetwork>,
    pub(crate) tuples: Vec<Vec<usize>>,
    pub(crate) tuple_index: HashMap<Vec<usize>, usize>,
}

impl NetworkSet {
    pub fn new(
        algebra: FiniteBao,
        shape: Shape,
        networks: Vec<Hypernetwork>,
    ) -> Result<NetworkSet> {
        let tuples = if shape.lambda > 1 {
            shape.hyper_tuples()
        } else {
            Vec::new()
        };
        let tuple_index = tuples
            .iter()
            .enumerate()
            .map(|(k, t)| (t.clone(), k))
            .collect();
        let set = NetworkSet {
            algebra,
            shape,
            networks,
            tuples,
            tuple_index,
        };
        for n in &set.networks {
            if n.nodes != shape.nodes
                || n.labels.len() != shape.nodes * shape.nodes
                || n.hyper.len() != set.tuples.len()
            {
                return Err(Error::Parameter("network does not match the shape".into()));
            }
        }
        Ok(set)
    }

    pub fn len(&self) -> usize {
        self.networks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.networks.is_empty()
    }

    /// Everything `n` says about tuples avoiding the nodes in `mask`;
    /// `M ≡_X N` iff their keys for `X` agree.
    pub fn key_off(&self, n: &Hypernetwork, mask: u32) -> Vec<u16> {
        let m = n.nodes;
        let avoid = |x: usize| mask & (1 << x) == 0;
        let mut key = Vec::with_capacity(m * m + n.hyper.len());
        for x in (0..m).filter(|&x| avoid(x)) {
            for y in (0..m).filter(|&y| avoid(y)) {
                key.push(n.labels[x * m + y]);
            }
        }
        for (t, &h) in self.tuples.iter().zip(&n.hyper) {
            if t.iter().all(|&x| avoid(x)) {
                key.push(h);
            }
        }
        key
    }

    /// `N∘τ` for a map `τ` on nodes.
    pub fn compose(&self, n: &Hypernetwork, tau: &[usize]) -> Hypernetwork {
        let m = n.nodes;
        let labels = (0..m * m)
            .map(|p| n.labels[tau[p / m] * m + tau[p % m]])
            .collect();
        let hyper = self
            .tuples
            .iter()
            .map(|t| {
                let image: Vec<usize> = t.iter().map(|&x| tau[x]).collect();
                n.hyper[self.tuple_index[&image]]
            })
            .collect();
        Hypernetwork {
            nodes: m,
            labels,
            hyper,
        }
    }
}

struct Tables {
    n: usize,
    conv: Vec<usize>,
    id_atoms: Vec<usize>,
    consistent: Vec<bool>,
}

impl Tables {
    fn new(a: &FiniteBao) -> Result<Tables> {
        let n = a.len();
        let comp = a.consistency()?;
        let conv = a
            .relation(&UnaryOp::Converse)?
            .as_function()
            .ok_or_else(|| Error::Frame("converse is not a map on atoms".into()))?;
        let id_atoms = a.constant(&ConstName::Id)?.as_vec();
        let mut consistent = vec![false; n * n * n];
        for (x, y, z) in comp.consistent_triples() {
            consistent[(x * n + y) * n + z] = true;
        }
        Ok(Tables {
            n,
            conv,
            id_atoms,
            consistent,
        })
    }

    fn triangle(&self, xy: usize, xz: usize, zy: usize) -> bool {
        self.consistent[(xy * self.n + xz) * self.n + zy]
    }
}

/// Positions in assignment order: node `x` gets `(x, x)` and then `(y, x)` for `y < x`.
fn positions(m: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for x in 0..m {
        out.push((x, x));
        for y in 0..x {
            out.push((y, x));
        }
    }
    out
}

struct Search<'a> {
    t: &'a Tables,
    m: usize,
    pos: Vec<(usize, usize)>,
}

impl Search<'_> {
    /// Whether every triangle inside nodes `0..=top` holds, given that all of
    /// them except those using pair `(p, q)` were checked already.
    fn ok(&self, lab: &[u16], assigned: &[bool], p: usize, q: usize) -> bool {
        let m = self.m;
        let top = q;
        for x in 0..=top {
            for y in 0..=top {
                for z in 0..=top {
                    let pairs = [(x, y), (x, z), (z, y)];
                    if !pairs
                        .iter()
                        .any(|&(u, v)| (u == p && v == q) || (u == q && v == p))
                    {
                        continue;
                    }
                    if !pairs.iter().all(|&(u, v)| assigned[u * m + v]) {
                        continue;
                    }
                    let l = |u: usize, v: usize| lab[u * m + v] as usize;
                    if !self.t.triangle(l(x, y), l(x, z), l(z, y)) {
                        return false;
                    }
                }
            }
        }
        true
    }

    fn run(
        &self,
        k: usize,
        lab: &mut Vec<u16>,
        assigned: &mut Vec<bool>,
        out: &mut Vec<Vec<u16>>,
        stop: usize,
    ) {
        if k == stop {
            out.push(lab.clone());
            return;
        }
        let m = self.m;
        let (p, q) = self.pos[k];
        let candidates: Vec<usize> = if p == q {
            self.t.id_atoms.clone()
        } else {
            (0..self.t.n).collect()
        };
        for c in candidates {
            lab[p * m + q] = c as u16;
            lab[q * m + p] = self.t.conv[c] as u16;
            assigned[p * m + q] = true;
            assigned[q * m + p] = true;
            if self.ok(lab, assigned, p, q) {
                self.run(k + 1, lab, assigned, out, stop);
            }
            assigned[p * m + q] = false;
            assigned[q * m + p] = false;
        }
    }
}

/// Every pair labelling satisfying the network laws, in lexicographic order
/// of assignment positions.
fn pair_labellings(a: &FiniteBao, m: usize) -> Result<Vec<Vec<u16>>> {
    let t = Tables::new(a)?;
    let s = Search {
        t: &t,
        m,
        pos: positions(m),
    };
    let total = s.pos.len();
    // Split after the first two nodes and finish the branches in parallel.
    let split = total.min(3);
    let mut prefixes = Vec::new();
    s.run(
        0,
        &mut vec![0; m * m],
        &mut vec![false; m * m],
        &mut prefixes,
        split,
    );
    let chunks: Vec<Vec<Vec<u16>>> = prefixes
        .into_par_iter()
        .map(|mut lab| {
            let mut assigned = vec![false; m * m];
            for &(p, q) in &s.pos[..split] {
                assigned[p * m + q] = true;
                assigned[q * m + p] = true;
            }
            let mut out = Vec::new();
            s.run(split, &mut lab, &mut assigned, &mut out, total);
            out
        })
        .collect();
    Ok(chunks.into_iter().flatten().collect())
}

/// `H_m^n(A, Λ)`: all `n` wide `m` dimensional `Λ` hypernetworks over `A`.
///
/// Since atoms below `Id` only compose to `Id` with their converse, the laws
/// force `N(y, x) = N(x, y)˘`; the search assigns both at once.
pub fn enumerate_hypernetworks(
    a: &FiniteBao,
    nodes: usize,
    width: usize,
    lambda: usize,
) -> Result<NetworkSet> {
    if !(3..=MAX_NODES).contains(&nodes) {
        return Err(Error::Parameter(format!(
            "node count {nodes} outside 3..={MAX_NODES}"
        )));
    }
    if width < nodes {
        return Err(Error::Parameter(format!(
            "width {width} is below the node count {nodes}"
        )));
    }
    if lambda == 0 {
        return Err(Error::Parameter("Λ must be nonempty".into()));
    }
    if a.len() > MAX_ATOMS {
        return Err(Error::CapExceeded(format!(
            "{} atoms above {MAX_ATOMS}",
            a.len()
        )));
    }
    let shape = Shape {
        nodes,
        width,
        lambda,
    };
    let pairs = pair_labellings(a, nodes)?;
    if pairs.len() > NETWORK_CAP {
        return Err(Error::CapExceeded(format!(
            "{} networks above {NETWORK_CAP}",
            pairs.len()
        )));
    }
    if lambda == 1 {
        let networks = pairs
            .into_iter()
            .map(|labels| Hypernetwork {
                nodes,
                labels,
                hyper: Vec::new(),
            })
            .collect();
        return NetworkSet::new(a.clone(), shape, networks);
    }
    let tuples = shape.hyper_tuples();
    let id = a.constant(&ConstName::Id)?;
    let mut networks = Vec::new();
    for labels in pairs {
        // Tuples that agree up to Id-labelled nodes share their hyperlabel.
        let rep: Vec<usize> = (0..nodes)
            .map(|x| {
                (0..nodes)
                    .find(|&y| id.contains(labels[x * nodes + y] as usize))
                    .unwrap_or(x)
            })
            .collect();
        let mut class_of: HashMap<Vec<usize>, usize> = HashMap::new();
        let classes: Vec<usize> = tuples
            .iter()
            .map(|t| {
                let key: Vec<usize> = t.iter().map(|&x| rep[x]).collect();
                let next = class_of.len();
                *class_of.entry(key).or_insert(next)
            })
            .collect();
        let c = class_of.len() as u32;
        let combos = lambda
            .checked_pow(c)
            .filter(|&k| networks.len() + k <= NETWORK_CAP);
        let Some(combos) = combos else {
            return Err(Error::CapExceeded(format!(
                "hyperlabel choices exceed {NETWORK_CAP} networks"
            )));
        };
        for mut code in 0..combos {
            let mut choice = vec![0u16; c as usize];
            for slot in choice.iter_mut() {
                *slot = (code % lambda) as u16;
                code /= lambda;
            }
            let hyper = classes.iter().map(|&k| choice[k]).collect();
            networks.push(Hypernetwork {
                nodes,
                labels: labels.clone(),
                hyper,
            });
        }
    }
    networks.sort();
    NetworkSet::new(a.clone(), shape, networks)
}

/// Checks the network laws literally; returns the first violated law.
pub fn check_network(set: &NetworkSet, n: &Hypernetwork) -> std::result::Result<(), String> {
    let a = &set.algebra;
    let m = n.nodes;
    let id = a.constant(&ConstName::Id).map_err(|e| e.to_string())?;
    let comp = a.consistency().map_err(|e| e.to_string())?;
    for x in 0..m {
        if !id.contains(n.label(x, x)) {
            return Err(format!("N({x},{x}) is not below Id"));
        }
    }
    for x in 0..m {
        for y in 0..m {
            for z in 0..m {
                if !comp.is_consistent(n.label(x, y), n.label(x, z), n.label(z, y)) {
                    return Err(format!("N({x},{y}) is not below N({x},{z});N({z},{y})"));
                }
            }
        }
    }
    let below_id = |u: usize, v: usize| id.contains(n.label(u, v));
    for (x0, x1, y0, y1) in (0..m.pow(4)).map(|c| (c % m, c / m % m, c / m / m % m, c / m / m / m))
    {
        if below_id(x0, y0) && below_id(x1, y1) && n.label(x0, x1) != n.label(y0, y1) {
            return Err(format!(
                "N({x0},{x1}) and N({y0},{y1}) differ on Id-related tuples"
            ));
        }
    }
    for (s, t) in set.tuples.iter().enumerate() {
        for (u, v) in set.tuples.iter().enumerate() {
            if t.len() == v.len()
                && t.iter().zip(v).all(|(&p, &q)| below_id(p, q))
                && n.hyper[s] != n.hyper[u]
            {
                return Err(format!(
                    "hyperlabels of {t:?} and {v:?} differ on Id-related tuples"
                ));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hh::hh_algebra;

    /// Filter over all labellings of ordered off-diagonal pairs.
    fn brute(a: &FiniteBao, m: usize) -> Vec<Vec<u16>> {
        let n = a.len();
        let comp = a.consistency().unwrap();
        let off: Vec<(usize, usize)> = (0..m)
            .flat_map(|x| (0..m).map(move |y| (x, y)))
            .filter(|(x, y)| x != y)
            .collect();
        let mut out = Vec::new();
        for mut code in 0..n.pow(off.len() as u32) {
            let mut lab = vec![0u16; m * m];
            for &(x, y) in &off {
                lab[x * m + y] = (code % n) as u16;
                code /= n;
            }
            let ok = (0..m).all(|x| {
                (0..m).all(|y| {
                    (0..m).all(|z| {
                        comp.is_consistent(
                            lab[x * m + y] as usize,
                            lab[x * m + z] as usize,
                            lab[z * m + y] as usize,
                        )
                    })
                })
            });
            if ok {
                out.push(lab);
            }
        }
        out.sort();
        out
    }

    #[test]
    fn enumeration_matches_brute_force() {
        let a = hh_algebra(3, 1, 3).unwrap();
        let set = enumerate_hypernetworks(&a, 3, 4, 1).unwrap();
        assert_eq!(set.len(), 181);
        let mut got: Vec<Vec<u16>> = set.networks.iter().map(|n| n.labels.clone()).collect();
        got.sort();
        assert_eq!(got, brute(&a, 3));
        for n in &set.networks {
            check_network(&set, n).unwrap();
            assert!((0..3).all(|x| n.label(x, x) == 0));
            assert!((0..3).all(|x| (0..3).all(|y| n.label(x, y) == n.label(y, x))));
        }
    }

    #[test]
    fn three_node_count_over_a4() {
        let a = hh_algebra(4, 1, 4).unwrap();
        assert_eq!(enumerate_hypernetworks(&a, 3, 5, 1).unwrap().len(), 1573);
    }

    #[test]
    fn hyperlabels_follow_id_classes() {
        let a = hh_algebra(3, 1, 3).unwrap();
        assert!(matches!(
            enumerate_hypernetworks(&a, 3, 3, 2),
            Err(Error::CapExceeded(_))
        ));
        let plain = enumerate_hypernetworks(&a, 3, 3, 1).unwrap();
        let shape = Shape {
            lambda: 2,
            ..plain.shape
        };
        let width = shape.hyper_tuples().len();
        let nets = plain
            .networks
            .iter()
            .map(|n| Hypernetwork {
                hyper: vec![0; width],
                ..n.clone()
            })
            .collect();
        let set = NetworkSet::new(a, shape, nets).unwrap();
        let merged = set.networks.iter().find(|n| n.label(0, 1) == 0).unwrap();
        check_network(&set, merged).unwrap();
        let mut bad = merged.clone();
        let single = set.tuple_index[&vec![0]];
        bad.hyper[single] = 1;
        assert!(check_network(&set, &bad).is_err());
        let tau = [1, 0, 2];
        assert_eq!(set.compose(&set.compose(&bad, &tau), &tau), bad);
    }

    #[test]
    fn parameters_are_checked() {
        let a = hh_algebra(3, 1, 3).unwrap();
        assert!(enumerate_hypernetworks(&a, 2, 4, 1).is_err());
        assert!(enumerate_hypernetworks(&a, 3, 2, 1).is_err());
        assert!(enumerate_hypernetworks(&a, 3, 3, 0).is_err());
    }
}

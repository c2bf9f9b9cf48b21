//! Hyperbasis clauses, symmetry, `Ca(H)`, restriction and the embedding of
//! the relation algebra into `Ra Ca(H)`.

use std::collections::{HashMap, HashSet};

use serde::Serialize;

use super::network::{check_network, Hypernetwork, NetworkSet, Shape};
use crate::atom::AtomId;
use crate::bao::{complex_algebra, FiniteBao};
use crate::dims::{ra_reduct, RaCoords, RaReduct};
use crate::element::Element;
use crate::error::{Error, Result};
use crate::frame::{AtomStructure, Relation};
use crate::morphisms::{check_homomorphism, MorphismWitness};
use crate::ops::{ConstName, UnaryOp};

/// `(x, y, N(x, z), N(z, y))` for a network `N` and a pivot `z`.
type Corner = (usize, usize, usize, usize);

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClauseResult {
    pub clause: String,
    pub holds: bool,
    pub witness: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HyperbasisReport {
    pub networks: usize,
    pub clauses: Vec<ClauseResult>,
}

impl HyperbasisReport {
    pub fn holds(&self) -> bool {
        self.clauses.iter().all(|c| c.holds)
    }

    pub fn first_failure(&self) -> Option<&ClauseResult> {
        self.clauses.iter().find(|c| !c.holds)
    }
}

fn clause(name: &str, witness: Option<String>) -> ClauseResult {
    ClauseResult {
        clause: name.into(),
        holds: witness.is_none(),
        witness,
    }
}

/// Checks every clause of the hyperbasis definition:
///
/// * `networks`: each member satisfies the network laws;
/// * `atoms`: every atom is `N(0, 1)` for some member;
/// * `witness`: if `N(x, y) ≤ a;b` and `z ∉ {x, y}` there is `M ≡_z N` with
///   `M(x, z) = a` and `M(z, y) = b`;
/// * `patching`: if `M ≡_{xy} N` there is `L` with `M ≡_x L ≡_y N`.
pub fn is_hyperbasis(set: &NetworkSet) -> Result<HyperbasisReport> {
    let a = &set.algebra;
    let comp = a.consistency()?;
    let atoms = a.len();
    let m = set.shape.nodes;
    let nets = &set.networks;
    let mut clauses = Vec::new();

    let bad = nets
        .iter()
        .enumerate()
        .find_map(|(k, n)| check_network(set, n).err().map(|e| format!("N{k}: {e}")));
    clauses.push(clause("networks", bad));

    let mut seen = vec![false; atoms];
    for n in nets {
        seen[n.label(0, 1)] = true;
    }
    let missing = seen
        .iter()
        .position(|s| !s)
        .map(|a| format!("no network has N(0,1) = atom {a}"));
    clauses.push(clause("atoms", missing));

    let mut witness = None;
    'z: for z in 0..m {
        let mut groups: HashMap<Vec<u16>, HashSet<Corner>> = HashMap::new();
        let keys: Vec<Vec<u16>> = nets.iter().map(|n| set.key_off(n, 1 << z)).collect();
        for (n, key) in nets.iter().zip(&keys) {
            let g = groups.entry(key.clone()).or_default();
            for x in (0..m).filter(|&x| x != z) {
                for y in (0..m).filter(|&y| y != z) {
                    g.insert((x, y, n.label(x, z), n.label(z, y)));
                }
            }
        }
        for (k, (n, key)) in nets.iter().zip(&keys).enumerate() {
            let g = &groups[key];
            for x in (0..m).filter(|&x| x != z) {
                for y in (0..m).filter(|&y| y != z) {
                    let xy = n.label(x, y);
                    for p in 0..atoms {
                        for q in 0..atoms {
                            if comp.is_consistent(xy, p, q) && !g.contains(&(x, y, p, q)) {
                                witness = Some(format!(
                                    "N{k}: no M ≡_{z} N with M({x},{z}) = atom {p} and M({z},{y}) = atom {q}"
                                ));
                                break 'z;
                            }
                        }
                    }
                }
            }
        }
    }
    clauses.push(clause("witness", witness));

    let mut patch = None;
    'xy: for x in 0..m {
        for y in (0..m).filter(|&y| y != x) {
            type Group = (
                HashSet<Vec<u16>>,
                HashSet<Vec<u16>>,
                HashSet<(Vec<u16>, Vec<u16>)>,
                Vec<usize>,
            );
            let mut groups: HashMap<Vec<u16>, Group> = HashMap::new();
            for (k, n) in nets.iter().enumerate() {
                let g = groups
                    .entry(set.key_off(n, (1 << x) | (1 << y)))
                    .or_default();
                let (kx, ky) = (set.key_off(n, 1 << x), set.key_off(n, 1 << y));
                g.0.insert(kx.clone());
                g.1.insert(ky.clone());
                g.2.insert((kx, ky));
                g.3.push(k);
            }
            for (xs, ys, pairs, members) in groups.values() {
                if pairs.len() != xs.len() * ys.len() {
                    let found = members.iter().find_map(|&i| {
                        members.iter().find_map(|&j| {
                            let want =
                                (set.key_off(&nets[i], 1 << x), set.key_off(&nets[j], 1 << y));
                            (!pairs.contains(&want)).then_some((i, j))
                        })
                    });
                    let (i, j) = found.expect("a missing pair exists");
                    patch = Some(format!(
                        "N{i} ≡_{x}{y} N{j} but no L with N{i} ≡_{x} L ≡_{y} N{j}"
                    ));
                    break 'xy;
                }
            }
        }
    }
    clauses.push(clause("patching", patch));
    Ok(HyperbasisReport {
        networks: nets.len(),
        clauses,
    })
}

/// Closure under `N ↦ N∘σ` for every map `σ` on nodes.
pub fn is_symmetric(set: &NetworkSet) -> bool {
    let m = set.shape.nodes;
    let members: HashSet<&Hypernetwork> = set.networks.iter().collect();
    (0..m.pow(m as u32)).all(|mut code| {
        let sigma: Vec<usize> = (0..m)
            .map(|_| {
                let v = code % m;
                code /= m;
                v
            })
            .collect();
        set.networks
            .iter()
            .all(|n| members.contains(&set.compose(n, &sigma)))
    })
}

/// `Ca(H)`: atoms are the networks, `c_i` is `≡_i`, `d_ij = {N : N(i,j) ≤ Id}`
/// and `p_ij X = {N∘[i,j] : N ∈ X} ∩ H`.
pub fn ca_of_hyperbasis(set: &NetworkSet) -> Result<FiniteBao> {
    if set.is_empty() {
        return Err(Error::Precondition("the hyperbasis is empty".into()));
    }
    let m = set.shape.nodes;
    let count = set.len();
    let id = set.algebra.constant(&ConstName::Id)?;
    let mut b = AtomStructure::builder((0..count).map(AtomId::Network).collect(), m);
    for i in 0..m {
        b = b.unary(
            UnaryOp::Cyl(i),
            Relation::from_keys(set.networks.iter().map(|n| set.key_off(n, 1 << i))),
        );
        for j in 0..m {
            let members = (0..count).filter(|&k| id.contains(set.networks[k].label(i, j)));
            b = b.constant(ConstName::Diag(i, j), Element::from_atoms(count, members));
        }
    }
    let index: HashMap<&Hypernetwork, usize> = set
        .networks
        .iter()
        .enumerate()
        .map(|(k, n)| (n, k))
        .collect();
    for i in 0..m {
        for j in i + 1..m {
            let mut sigma: Vec<usize> = (0..m).collect();
            sigma.swap(i, j);
            let images = set.networks.iter().map(|n| {
                index
                    .get(&set.compose(n, &sigma))
                    .map(|&k| vec![k])
                    .unwrap_or_default()
            });
            b = b.unary(UnaryOp::Swap(i, j), Relation::from_images(images));
        }
    }
    Ok(complex_algebra(b.build()?))
}

/// `H|_k`: every network restricted to the nodes below `k`, without repeats.
pub fn restrict_hyperbasis(set: &NetworkSet, k: usize) -> Result<NetworkSet> {
    let m = set.shape.nodes;
    if k == 0 || k > m {
        return Err(Error::Parameter(format!(
            "cannot restrict {m} nodes to {k}"
        )));
    }
    let mut nets = restrict_each(set, k);
    nets.sort();
    nets.dedup();
    NetworkSet::new(
        set.algebra.clone(),
        Shape {
            nodes: k,
            ..set.shape
        },
        nets,
    )
}

/// The map `a ↦ {N ∈ H : N(0,1) ≤ a}` into the relation algebra reduct of
/// `Ca(H)` on coordinates `(0, 1)` with spare coordinate 2, with its verified
/// properties.
pub fn ra_embedding(set: &NetworkSet) -> Result<(RaReduct, MorphismWitness)> {
    let ca = ca_of_hyperbasis(set)?;
    let ra = ra_reduct(&ca, RaCoords { u: 0, v: 1, w: 2 }, false)?;
    let a = &set.algebra;
    let mut images = Vec::with_capacity(a.len());
    for atom in 0..a.len() {
        let fibre = Element::from_atoms(
            set.len(),
            (0..set.len()).filter(|&k| set.networks[k].label(0, 1) == atom),
        );
        let mut img = Element::zero(ra.atoms);
        for (k, block) in ra.blocks.iter().enumerate() {
            if block.le(&fibre) {
                img.insert(k);
            } else if !block.disjoint(&fibre) {
                return Err(Error::Precondition(format!(
                    "the fibre of atom {atom} is not two-dimensional"
                )));
            }
        }
        images.push(img);
    }
    let w = check_homomorphism(a, &ra.algebra, &images)?;
    Ok((ra, w))
}

/// `x = {N : every node j in m..nodes is Id-related to some node below m}`.
pub fn hh_x_element(set: &NetworkSet, m: usize) -> Result<Element> {
    let nodes = set.shape.nodes;
    if m == 0 || m > nodes {
        return Err(Error::Parameter(format!("m = {m} outside 1..={nodes}")));
    }
    let id = set.algebra.constant(&ConstName::Id)?;
    let inside = |n: &Hypernetwork| (m..nodes).all(|j| (0..m).any(|i| id.contains(n.label(i, j))));
    Ok(Element::from_atoms(
        set.len(),
        (0..set.len()).filter(|&k| inside(&set.networks[k])),
    ))
}

/// `I(S) = {f ∈ x : f restricted to m nodes lies in S}`, for `S` an element of
/// `Ca(small)` where `small` holds networks on the first `m` nodes.
pub fn i_map(big: &NetworkSet, x: &Element, small: &NetworkSet, s: &Element) -> Result<Element> {
    let m = small.shape.nodes;
    let index: HashMap<&Hypernetwork, usize> = small
        .networks
        .iter()
        .enumerate()
        .map(|(k, n)| (n, k))
        .collect();
    let restricted = restrict_each(big, m);
    let mut out = Element::zero(big.len());
    for f in x.atoms() {
        match index.get(&restricted[f]) {
            Some(&k) if s.contains(k) => out.insert(f),
            Some(_) => {}
            None => {
                return Err(Error::Precondition(format!(
                    "restriction of network {f} is not in the small set"
                )))
            }
        }
    }
    Ok(out)
}

fn restrict_each(set: &NetworkSet, k: usize) -> Vec<Hypernetwork> {
    let m = set.shape.nodes;
    let shape = Shape {
        nodes: k,
        ..set.shape
    };
    let old: Vec<usize> = if shape.lambda > 1 {
        shape
            .hyper_tuples()
            .iter()
            .map(|t| set.tuple_index[t])
            .collect()
    } else {
        Vec::new()
    };
    set.networks
        .iter()
        .map(|n| Hypernetwork {
            nodes: k,
            labels: (0..k * k).map(|p| n.labels[(p / k) * m + p % k]).collect(),
            hyper: old.iter().map(|&t| n.hyper[t]).collect(),
        })
        .collect()
}

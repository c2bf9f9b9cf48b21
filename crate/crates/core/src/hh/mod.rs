//! The relation algebras `A(n, r)` and their hypernetworks.
//!
//! `A(n, r)` with parameter `Ψ` has atoms `Id` and `a^k(i, j)` for `i < n-1`,
//! `j < r`, `k < Ψ`, all self-converse. Forbidden are the permutations of
//! `(Id, s, t)` with `s ≠ t` and of `(a^k(i,j), a^k'(i,j), a^k''(i,j'))` with
//! `j ≤ j'`; every other triple is consistent.

mod basis;
mod network;

pub use basis::{
    ca_of_hyperbasis, hh_x_element, i_map, is_hyperbasis, is_symmetric, ra_embedding,
    restrict_hyperbasis, ClauseResult, HyperbasisReport,
};
pub use network::{
    check_network, enumerate_hypernetworks, Hypernetwork, NetworkSet, Shape, MAX_ATOMS, MAX_NODES,
    NETWORK_CAP,
};

use crate::atom::AtomId;
use crate::bao::{complex_algebra, FiniteBao};
use crate::element::Element;
use crate::error::{Error, Result};
use crate::frame::{AtomStructure, Consistency, Relation};
use crate::ops::{ConstName, Signature, UnaryOp};

/// Largest atom count accepted for `A(n, r)`.
pub const HH_ATOM_CAP: usize = 1024;

/// Atoms of `A(n, r)`: `Id` first, then `a^k(i, j)` ordered by `(i, j, k)`.
pub fn hh_atoms(n: usize, r: usize, psi: usize) -> Result<Vec<AtomId>> {
    if n < 3 {
        return Err(Error::Parameter(format!("n = {n} is below 3")));
    }
    if psi < n.max(r) {
        return Err(Error::Parameter(format!(
            "Ψ = {psi} is below max(n, r) = {}",
            n.max(r)
        )));
    }
    let count = (n - 1)
        .checked_mul(r)
        .and_then(|x| x.checked_mul(psi))
        .map(|x| x + 1);
    if count.is_none_or(|c| c > HH_ATOM_CAP) {
        return Err(Error::CapExceeded(format!(
            "A({n}, {r}) with Ψ = {psi} exceeds {HH_ATOM_CAP} atoms"
        )));
    }
    let mut out = vec![AtomId::Id];
    for i in 0..n - 1 {
        for j in 0..r {
            for k in 0..psi {
                out.push(AtomId::Hh { i, j, k });
            }
        }
    }
    Ok(out)
}

fn forbidden(x: &AtomId, y: &AtomId, z: &AtomId) -> bool {
    use AtomId::{Hh, Id};
    let t = [x, y, z];
    if t.contains(&&Id) {
        // A permutation of (Id, s, t) is consistent only when s = t.
        return !(0..3).any(|p| *t[p] == Id && t[(p + 1) % 3] == t[(p + 2) % 3]);
    }
    let (Hh { i: i0, j: j0, .. }, Hh { i: i1, j: j1, .. }, Hh { i: i2, j: j2, .. }) = (x, y, z)
    else {
        return false;
    };
    if !(i0 == i1 && i1 == i2) {
        return false;
    }
    // Two of the three share j and the third has j' ≥ j.
    let js = [j0, j1, j2];
    (0..3).any(|odd| {
        let pair: Vec<usize> = (0..3).filter(|&p| p != odd).map(|p| *js[p]).collect();
        pair[0] == pair[1] && pair[0] <= *js[odd]
    })
}

/// The atom structure of `A(n, r)` with parameter `Ψ`.
pub fn hh_structure(n: usize, r: usize, psi: usize) -> Result<AtomStructure> {
    let atoms = hh_atoms(n, r, psi)?;
    let count = atoms.len();
    let comp =
        Consistency::from_predicate(count, |a, b, c| !forbidden(&atoms[a], &atoms[b], &atoms[c]));
    let closed = comp.forbidden_triples().all(|(a, b, c)| {
        [(a, c, b), (b, a, c), (b, c, a), (c, a, b), (c, b, a)]
            .iter()
            .all(|&(x, y, z)| !comp.is_consistent(x, y, z))
    });
    if !closed {
        return Err(Error::Frame(
            "forbidden triples are not closed under permutation".into(),
        ));
    }
    let identity: Vec<usize> = (0..count).collect();
    AtomStructure::builder(atoms, 0)
        .unary(UnaryOp::Converse, Relation::from_function(&identity))
        .constant(ConstName::Id, Element::atom(count, 0))
        .composition(comp)
        .declare(Signature::relational())
        .build()
}

pub fn hh_algebra(n: usize, r: usize, psi: usize) -> Result<FiniteBao> {
    Ok(complex_algebra(hh_structure(n, r, psi)?))
}

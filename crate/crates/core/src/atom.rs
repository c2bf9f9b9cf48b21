use std::fmt;

use serde::{Deserialize, Serialize};

/// A structured atom identifier.
///
/// Identifiers only serve display and serialization; algebra code works on
/// atom indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AtomId {
    Index(usize),
    Named(String),
    /// A sequence of a full set algebra.
    Tuple(Vec<usize>),
    /// A Monk atom: `partition` is the restricted-growth string of R and
    /// `colours` lists `(κ, λ, f_κλ)` for κ < λ in distinct classes.
    Monk {
        partition: Vec<usize>,
        colours: Vec<(usize, usize, usize)>,
    },
    /// The identity atom of a relation algebra.
    Id,
    /// The atom `a^k(i, j)` of `A(n, r)`.
    Hh {
        i: usize,
        j: usize,
        k: usize,
    },
    /// Position of a hypernetwork in its hyperbasis.
    Network(usize),
    /// An atom of a quotient or subalgebra frame, numbered in order.
    Block(usize),
    /// Piece `piece` of the split atom `s_τ R`, where `tau` indexes the
    /// substitution group.
    Split {
        tau: usize,
        piece: usize,
    },
    /// An atom of a product, tagged with its factor.
    Product {
        factor: usize,
        atom: Box<AtomId>,
    },
}

impl fmt::Display for AtomId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AtomId::Index(i) => write!(f, "#{i}"),
            AtomId::Named(s) => write!(f, "{s}"),
            AtomId::Tuple(t) => {
                write!(f, "(")?;
                for (k, v) in t.iter().enumerate() {
                    if k > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{v}")?;
                }
                write!(f, ")")
            }
            AtomId::Monk { partition, colours } => {
                let blocks = partition.iter().copied().max().map_or(0, |m| m + 1);
                write!(f, "R=")?;
                for b in 0..blocks {
                    if b > 0 {
                        write!(f, "|")?;
                    }
                    for (p, _) in partition.iter().enumerate().filter(|(_, c)| **c == b) {
                        write!(f, "{p}")?;
                    }
                }
                write!(f, " f=")?;
                for (k, (a, b, c)) in colours.iter().enumerate() {
                    if k > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{a}{b}:{c}")?;
                }
                Ok(())
            }
            AtomId::Id => write!(f, "Id"),
            AtomId::Hh { i, j, k } => write!(f, "a^{k}({i},{j})"),
            AtomId::Network(n) => write!(f, "N{n}"),
            AtomId::Block(b) => write!(f, "[{b}]"),
            AtomId::Split { tau, piece } => write!(f, "s{tau}R{piece}"),
            AtomId::Product { factor, atom } => write!(f, "{factor}:{atom}"),
        }
    }
}

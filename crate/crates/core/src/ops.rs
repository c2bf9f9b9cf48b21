//! Operator and constant names shared by frames, terms and the JSON form.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// A unary operator slot of a signature.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum UnaryOp {
    /// Cylindrifier `c_i`.
    Cyl(usize),
    /// Directed cylindrifier `C_i^↑`.
    CylUp(usize),
    /// Directed cylindrifier `C_i^↓`.
    CylDown(usize),
    /// Transposition substitution `p_ij`.
    Swap(usize, usize),
    /// Substitution `s_τ` for a transformation given by its image list.
    Subst(Vec<usize>),
    /// Relation-algebra converse.
    Converse,
    Custom(String),
}

/// A constant slot of a signature.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ConstName {
    Diag(usize, usize),
    /// Relation-algebra identity `1'`.
    Id,
    Custom(String),
}

fn write_indices(f: &mut fmt::Formatter<'_>, idx: &[usize]) -> fmt::Result {
    if idx.iter().all(|&i| i < 10) {
        for i in idx {
            write!(f, "{i}")?;
        }
    } else {
        for i in idx {
            write!(f, "_{i}")?;
        }
    }
    Ok(())
}

fn parse_indices(s: &str, arity: usize) -> Option<Vec<usize>> {
    if let Some(rest) = s.strip_prefix('_') {
        let v: Option<Vec<usize>> = rest.split('_').map(|p| p.parse().ok()).collect();
        return v.filter(|v| v.len() == arity);
    }
    if s.len() != arity || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    Some(s.bytes().map(|b| (b - b'0') as usize).collect())
}

impl fmt::Display for UnaryOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UnaryOp::Cyl(i) => {
                write!(f, "c")?;
                write_indices(f, &[*i])
            }
            UnaryOp::CylUp(i) => {
                write!(f, "cu")?;
                write_indices(f, &[*i])
            }
            UnaryOp::CylDown(i) => {
                write!(f, "cd")?;
                write_indices(f, &[*i])
            }
            UnaryOp::Swap(i, j) => {
                write!(f, "p")?;
                write_indices(f, &[*i, *j])
            }
            UnaryOp::Subst(t) => {
                write!(f, "s[")?;
                for (k, v) in t.iter().enumerate() {
                    if k > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{v}")?;
                }
                write!(f, "]")
            }
            UnaryOp::Converse => write!(f, "conv"),
            UnaryOp::Custom(s) => write!(f, "{s}"),
        }
    }
}

impl FromStr for UnaryOp {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        if s == "conv" {
            return Ok(UnaryOp::Converse);
        }
        if let Some(body) = s.strip_prefix("s[").and_then(|r| r.strip_suffix(']')) {
            let t: Result<Vec<usize>, _> =
                body.split(',').map(|p| p.trim().parse::<usize>()).collect();
            return t
                .map(UnaryOp::Subst)
                .map_err(|_| Error::UnknownSymbol(s.to_string()));
        }
        for (prefix, arity) in [("cu", 1), ("cd", 1), ("c", 1), ("p", 2)] {
            if let Some(rest) = s.strip_prefix(prefix) {
                if let Some(idx) = parse_indices(rest, arity) {
                    return Ok(match prefix {
                        "cu" => UnaryOp::CylUp(idx[0]),
                        "cd" => UnaryOp::CylDown(idx[0]),
                        "c" => UnaryOp::Cyl(idx[0]),
                        _ => UnaryOp::Swap(idx[0], idx[1]),
                    });
                }
            }
        }
        Ok(UnaryOp::Custom(s.to_string()))
    }
}

impl fmt::Display for ConstName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConstName::Diag(i, j) => {
                write!(f, "d")?;
                write_indices(f, &[*i, *j])
            }
            ConstName::Id => write!(f, "Id"),
            ConstName::Custom(s) => write!(f, "{s}"),
        }
    }
}

impl FromStr for ConstName {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        if s == "Id" || s == "1'" {
            return Ok(ConstName::Id);
        }
        if let Some(idx) = s.strip_prefix('d').and_then(|r| parse_indices(r, 2)) {
            return Ok(ConstName::Diag(idx[0], idx[1]));
        }
        Ok(ConstName::Custom(s.to_string()))
    }
}

macro_rules! string_serde {
    ($t:ty) => {
        impl Serialize for $t {
            fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                s.collect_str(self)
            }
        }
        impl<'de> Deserialize<'de> for $t {
            fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
                let s = String::deserialize(d)?;
                s.parse().map_err(serde::de::Error::custom)
            }
        }
    };
}
string_serde!(UnaryOp);
string_serde!(ConstName);

impl UnaryOp {
    /// Dimension indices the operator refers to.
    pub fn indices(&self) -> Vec<usize> {
        match self {
            UnaryOp::Cyl(i) | UnaryOp::CylUp(i) | UnaryOp::CylDown(i) => vec![*i],
            UnaryOp::Swap(i, j) => vec![*i, *j],
            UnaryOp::Subst(t) => t
                .iter()
                .enumerate()
                .filter(|(k, v)| *k != **v)
                .flat_map(|(k, v)| [k, *v])
                .collect(),
            UnaryOp::Converse | UnaryOp::Custom(_) => vec![],
        }
    }

    /// Renames dimension indices along `map`; `None` if an index is unmapped
    /// or the operator cannot be renamed.
    pub fn reindex(&self, map: impl Fn(usize) -> Option<usize>) -> Option<UnaryOp> {
        Some(match self {
            UnaryOp::Cyl(i) => UnaryOp::Cyl(map(*i)?),
            UnaryOp::CylUp(i) => UnaryOp::CylUp(map(*i)?),
            UnaryOp::CylDown(i) => UnaryOp::CylDown(map(*i)?),
            UnaryOp::Swap(i, j) => UnaryOp::Swap(map(*i)?, map(*j)?),
            UnaryOp::Subst(_) => return None,
            UnaryOp::Converse => UnaryOp::Converse,
            UnaryOp::Custom(s) => UnaryOp::Custom(s.clone()),
        })
    }

    /// True for the cylindric part of a signature (`c_i` only).
    pub fn is_cylindrifier(&self) -> bool {
        matches!(self, UnaryOp::Cyl(_))
    }
}

impl ConstName {
    pub fn indices(&self) -> Vec<usize> {
        match self {
            ConstName::Diag(i, j) => vec![*i, *j],
            _ => vec![],
        }
    }

    pub fn reindex(&self, map: impl Fn(usize) -> Option<usize>) -> Option<ConstName> {
        Some(match self {
            ConstName::Diag(i, j) => ConstName::Diag(map(*i)?, map(*j)?),
            other => other.clone(),
        })
    }
}

/// The declared operator slots of a frame.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct Signature {
    pub dim: usize,
    pub unary: Vec<UnaryOp>,
    pub constants: Vec<ConstName>,
    #[serde(default)]
    pub composition: bool,
}

impl Signature {
    /// Cylindric signature: `c_i` and `d_ij` for `i, j < dim`.
    pub fn cylindric(dim: usize) -> Self {
        Signature {
            dim,
            unary: (0..dim).map(UnaryOp::Cyl).collect(),
            constants: (0..dim)
                .flat_map(|i| (0..dim).map(move |j| ConstName::Diag(i, j)))
                .collect(),
            composition: false,
        }
    }

    /// Relation-algebra signature: `;`, converse and `1'`.
    pub fn relational() -> Self {
        Signature {
            dim: 0,
            unary: vec![UnaryOp::Converse],
            constants: vec![ConstName::Id],
            composition: true,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        let ops = [
            UnaryOp::Cyl(3),
            UnaryOp::Cyl(12),
            UnaryOp::CylUp(0),
            UnaryOp::CylDown(2),
            UnaryOp::Swap(0, 1),
            UnaryOp::Subst(vec![1, 0, 2]),
            UnaryOp::Converse,
            UnaryOp::Custom("f".into()),
        ];
        for op in ops {
            assert_eq!(op.to_string().parse::<UnaryOp>().unwrap(), op);
        }
        for c in [
            ConstName::Diag(0, 1),
            ConstName::Diag(10, 2),
            ConstName::Id,
            ConstName::Custom("R".into()),
        ] {
            assert_eq!(c.to_string().parse::<ConstName>().unwrap(), c);
        }
        assert_eq!(UnaryOp::Cyl(0).to_string(), "c0");
        assert_eq!(ConstName::Diag(0, 1).to_string(), "d01");
    }
}

//! JSON form of atom structures.
//!
//! ```text
//! {
//!   "schema_version": 1,
//!   "atoms": [...],
//!   "signature": {"dim": 3, "unary": ["c0", ...], "constants": ["d01", ...], "composition": false},
//!   "unary": {"c0": [[a, b], ...] | {"classes": [[a, ...], ...]}},
//!   "consistency": {"forbidden": [[a, b, c], ...]} | {"consistent": [...]},
//!   "constants": {"d01": [a, ...]}
//! }
//! ```
//!
//! A pair `[a, b]` under `unary` means `(a, b) ∈ T`, i.e. `a ∈ op({b})`.
//! Output is canonical: keys sorted, pairs and classes sorted.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::atom::AtomId;
use crate::element::Element;
use crate::error::{Error, Result};
use crate::frame::{AtomStructure, Consistency, Relation};
use crate::ops::{ConstName, Signature, UnaryOp};

pub const SCHEMA_VERSION: u64 = 1;

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum RelationRepr {
    Pairs(Vec<(usize, usize)>),
    Classes { classes: Vec<Vec<usize>> },
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum ConsistencyRepr {
    Forbidden(Vec<(usize, usize, usize)>),
    Consistent(Vec<(usize, usize, usize)>),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FrameRepr {
    schema_version: u64,
    atoms: Vec<AtomId>,
    signature: Signature,
    #[serde(default)]
    unary: BTreeMap<UnaryOp, RelationRepr>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    consistency: Option<ConsistencyRepr>,
    #[serde(default)]
    constants: BTreeMap<ConstName, Vec<usize>>,
}

pub fn to_value(frame: &AtomStructure) -> Value {
    let n = frame.len();
    let unary = frame
        .unary_ops()
        .map(|(op, rel)| {
            let repr = match rel.equivalence_classes() {
                Some(class) => {
                    let mut classes: Vec<Vec<usize>> =
                        vec![Vec::new(); class.iter().map(|&c| c as usize + 1).max().unwrap_or(0)];
                    for (a, &c) in class.iter().enumerate() {
                        classes[c as usize].push(a);
                    }
                    classes.sort();
                    RelationRepr::Classes { classes }
                }
                None => {
                    let mut pairs: Vec<_> = rel.pairs().collect();
                    pairs.sort_unstable();
                    RelationRepr::Pairs(pairs)
                }
            };
            (op.clone(), repr)
        })
        .collect();
    let consistency = frame.composition().map(|c| {
        let total = n * n * n;
        let consistent: Vec<_> = c.consistent_triples().collect();
        if consistent.len() * 2 < total {
            let mut v = consistent;
            v.sort_unstable();
            ConsistencyRepr::Consistent(v)
        } else {
            let mut v: Vec<_> = c.forbidden_triples().collect();
            v.sort_unstable();
            ConsistencyRepr::Forbidden(v)
        }
    });
    let constants = frame
        .constants()
        .map(|(c, e)| (c.clone(), e.as_vec()))
        .collect();
    let repr = FrameRepr {
        schema_version: SCHEMA_VERSION,
        atoms: frame.atoms().to_vec(),
        signature: frame.signature().clone(),
        unary,
        consistency,
        constants,
    };
    serde_json::to_value(repr).expect("frame serializes")
}

pub fn to_string(frame: &AtomStructure) -> String {
    serde_json::to_string_pretty(&to_value(frame)).expect("value serializes")
}

pub fn from_value(value: Value) -> Result<AtomStructure> {
    let repr: FrameRepr = serde_json::from_value(value)?;
    if repr.schema_version != SCHEMA_VERSION {
        return Err(Error::Json(format!(
            "unsupported schema_version {}",
            repr.schema_version
        )));
    }
    let n = repr.atoms.len();
    let check = |i: usize| {
        if i < n {
            Ok(i)
        } else {
            Err(Error::Frame(format!("atom index {i} outside 0..{n}")))
        }
    };
    let mut builder =
        AtomStructure::builder(repr.atoms, repr.signature.dim).declare(repr.signature);
    for (op, rel) in repr.unary {
        let rel = match rel {
            RelationRepr::Pairs(pairs) => {
                for &(a, b) in &pairs {
                    check(a)?;
                    check(b)?;
                }
                Relation::from_pairs(n, pairs).normalized()
            }
            RelationRepr::Classes { classes } => {
                let mut class = vec![u32::MAX; n];
                for (k, members) in classes.iter().enumerate() {
                    for &a in members {
                        if class[check(a)?] != u32::MAX {
                            return Err(Error::Frame(format!(
                                "atom {a} appears in two classes of {op}"
                            )));
                        }
                        class[a] = k as u32;
                    }
                }
                if class.contains(&u32::MAX) {
                    return Err(Error::Frame(format!(
                        "classes of {op} do not cover every atom"
                    )));
                }
                Relation::from_classes(class)
            }
        };
        builder = builder.unary(op, rel);
    }
    if let Some(c) = repr.consistency {
        let comp = match c {
            ConsistencyRepr::Forbidden(t) => {
                for &(a, b, c) in &t {
                    check(a)?;
                    check(b)?;
                    check(c)?;
                }
                Consistency::from_forbidden(n, t)
            }
            ConsistencyRepr::Consistent(t) => {
                for &(a, b, c) in &t {
                    check(a)?;
                    check(b)?;
                    check(c)?;
                }
                Consistency::from_consistent(n, t)
            }
        };
        builder = builder.composition(comp);
    }
    for (c, atoms) in repr.constants {
        builder = builder.constant(
            c,
            Element::try_from_atoms(n, atoms).map_err(|e| Error::Frame(e.to_string()))?,
        );
    }
    builder.build()
}

pub fn from_str(s: &str) -> Result<AtomStructure> {
    from_value(serde_json::from_str(s)?)
}

//! Finite cylindric, polyadic and relation algebras.
//!
//! Algebras are complex algebras of finite atom structures. Elements are sets
//! of atoms and every operator is computed atom by atom.

pub mod atom;
pub mod bao;
pub mod dims;
pub mod element;
pub mod error;
pub mod frame;
pub mod hh;
pub mod json;
pub mod monk;
pub mod morphisms;
pub mod ops;
pub mod qra;
pub mod sets;
pub mod splitting;
pub mod term;

pub use atom::AtomId;
pub use bao::{complex_algebra, FiniteBao, Subalgebra};
pub use element::Element;
pub use error::{Error, Result};
pub use frame::{AtomStructure, Consistency, Relation};
pub use ops::{ConstName, Signature, UnaryOp};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/atom-structures.md")]
    mod atom_structures {}
    #[doc = include_str!("../../../book/src/terms.md")]
    mod terms {}
    #[doc = include_str!("../../../book/src/dimensions.md")]
    mod dimensions {}
    #[doc = include_str!("../../../book/src/monk.md")]
    mod monk {}
    #[doc = include_str!("../../../book/src/hypernetworks.md")]
    mod hypernetworks {}
    #[doc = include_str!("../../../book/src/set-algebras.md")]
    mod set_algebras {}
    #[doc = include_str!("../../../book/src/splitting.md")]
    mod splitting {}
    #[doc = include_str!("../../../book/src/qra.md")]
    mod qra {}
    #[doc = include_str!("../../../book/src/morphisms.md")]
    mod morphisms {}
}

use std::fmt;
use std::ops::{BitAnd, BitOr, Not};

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// An element of a finite atomic Boolean algebra: the set of atoms below it.
///
/// The length of the underlying bitset is the number of atoms of the frame,
/// so complements are always taken relative to the frame's unit.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Element(FixedBitSet);

impl Element {
    pub fn zero(atoms: usize) -> Self {
        Element(FixedBitSet::with_capacity(atoms))
    }

    pub fn one(atoms: usize) -> Self {
        let mut bits = FixedBitSet::with_capacity(atoms);
        bits.insert_range(..);
        Element(bits)
    }

    pub fn atom(atoms: usize, index: usize) -> Self {
        let mut e = Self::zero(atoms);
        e.insert(index);
        e
    }

    /// Builds an element from atom indices; panics on an index outside the frame.
    pub fn from_atoms<I: IntoIterator<Item = usize>>(atoms: usize, indices: I) -> Self {
        let mut e = Self::zero(atoms);
        for i in indices {
            e.insert(i);
        }
        e
    }

    /// Like [`Element::from_atoms`] but reports out-of-range indices.
    pub fn try_from_atoms<I: IntoIterator<Item = usize>>(atoms: usize, indices: I) -> Result<Self> {
        let mut e = Self::zero(atoms);
        for i in indices {
            if i >= atoms {
                return Err(Error::IndexOutOfRange {
                    index: i,
                    bound: atoms,
                });
            }
            e.insert(i);
        }
        Ok(e)
    }

    /// Element whose atoms are given by the low bits of `mask`.
    pub fn from_mask(atoms: usize, mask: u64) -> Self {
        Self::from_atoms(atoms, (0..atoms.min(64)).filter(|i| mask >> i & 1 == 1))
    }

    /// Number of atoms of the ambient frame.
    pub fn universe(&self) -> usize {
        self.0.len()
    }

    pub fn insert(&mut self, index: usize) {
        self.0.insert(index);
    }

    pub fn remove(&mut self, index: usize) {
        self.0.set(index, false);
    }

    pub fn contains(&self, index: usize) -> bool {
        self.0.contains(index)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_clear()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_full()
    }

    /// Number of atoms below this element.
    pub fn count(&self) -> usize {
        self.0.count_ones(..)
    }

    pub fn atoms(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.ones()
    }

    pub fn first_atom(&self) -> Option<usize> {
        self.0.minimum()
    }

    fn check(&self, other: &Element) -> Result<()> {
        if self.universe() != other.universe() {
            return Err(Error::FrameMismatch {
                expected: self.universe(),
                found: other.universe(),
            });
        }
        Ok(())
    }

    pub fn try_join(&self, other: &Element) -> Result<Element> {
        self.check(other)?;
        Ok(self | other)
    }

    pub fn try_meet(&self, other: &Element) -> Result<Element> {
        self.check(other)?;
        Ok(self & other)
    }

    pub fn try_le(&self, other: &Element) -> Result<bool> {
        self.check(other)?;
        Ok(self.le(other))
    }

    pub fn join_with(&mut self, other: &Element) {
        assert_eq!(self.universe(), other.universe(), "frame mismatch");
        self.0.union_with(&other.0);
    }

    pub fn meet_with(&mut self, other: &Element) {
        assert_eq!(self.universe(), other.universe(), "frame mismatch");
        self.0.intersect_with(&other.0);
    }

    pub fn minus(&self, other: &Element) -> Element {
        assert_eq!(self.universe(), other.universe(), "frame mismatch");
        let mut out = self.clone();
        out.0.difference_with(&other.0);
        out
    }

    /// Boolean order `self ≤ other`.
    pub fn le(&self, other: &Element) -> bool {
        assert_eq!(self.universe(), other.universe(), "frame mismatch");
        self.0.is_subset(&other.0)
    }

    pub fn disjoint(&self, other: &Element) -> bool {
        assert_eq!(self.universe(), other.universe(), "frame mismatch");
        self.0.is_disjoint(&other.0)
    }

    pub fn complement(&self) -> Element {
        let mut bits = self.0.clone();
        bits.toggle_range(..);
        Element(bits)
    }

    pub fn as_vec(&self) -> Vec<usize> {
        self.atoms().collect()
    }

    /// Bitmask of the element when the frame has at most 64 atoms.
    pub fn to_mask(&self) -> Option<u64> {
        if self.universe() > 64 {
            return None;
        }
        Some(self.atoms().fold(0u64, |m, i| m | 1 << i))
    }
}

impl BitOr for &Element {
    type Output = Element;
    fn bitor(self, rhs: &Element) -> Element {
        let mut out = self.clone();
        out.join_with(rhs);
        out
    }
}

impl BitAnd for &Element {
    type Output = Element;
    fn bitand(self, rhs: &Element) -> Element {
        let mut out = self.clone();
        out.meet_with(rhs);
        out
    }
}

impl Not for &Element {
    type Output = Element;
    fn not(self) -> Element {
        self.complement()
    }
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.atoms().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}/{}", self.universe())
    }
}

/// Serialized form: `{"universe": n, "atoms": [..]}`.
#[derive(Serialize, Deserialize)]
struct ElementRepr {
    universe: usize,
    atoms: Vec<usize>,
}

impl Serialize for Element {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ElementRepr {
            universe: self.universe(),
            atoms: self.as_vec(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Element {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = ElementRepr::deserialize(d)?;
        Element::try_from_atoms(repr.universe, repr.atoms).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn join_with_complement_is_one() {
        let x = Element::from_atoms(5, [0, 3]);
        assert!((&x | &!&x).is_one());
    }

    #[test]
    fn meet_with_zero_is_zero() {
        let x = Element::from_atoms(5, [0, 3]);
        assert!((&x & &Element::zero(5)).is_zero());
    }

    #[test]
    fn mismatched_frames_are_reported() {
        let x = Element::zero(3);
        let y = Element::zero(4);
        assert_eq!(
            x.try_join(&y),
            Err(Error::FrameMismatch {
                expected: 3,
                found: 4
            })
        );
        assert!(Element::try_from_atoms(3, [3]).is_err());
    }

    #[test]
    fn mask_round_trip() {
        let x = Element::from_mask(7, 0b1010011);
        assert_eq!(x.to_mask(), Some(0b1010011));
        assert_eq!(x.count(), 4);
    }
}

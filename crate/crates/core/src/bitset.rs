//! Compact fluent sets backed by 64-bit blocks.
//!
//! States, preconditions, and effects are all sets over the dense fluent
//! indexing of a task, so every set operation here is a handful of word
//! operations. Sets are kept normalized (no trailing zero blocks), which
//! makes `Eq`/`Hash`/`Ord` structural and cheap.

use std::fmt;

use crate::strips::FluentId;

const BLOCK_BITS: usize = 64;

/// A set of fluent ids. Value-like: cheap to clone, hashable, ordered.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FluentSet {
    blocks: Vec<u64>,
}

impl FluentSet {
    pub fn new() -> Self {
        FluentSet { blocks: Vec::new() }
    }

    pub fn from_ids<I: IntoIterator<Item = FluentId>>(ids: I) -> Self {
        let mut set = FluentSet::new();
        for id in ids {
            set.insert(id);
        }
        set
    }

    fn normalize(&mut self) {
        while let Some(&last) = self.blocks.last() {
            if last == 0 {
                self.blocks.pop();
            } else {
                break;
            }
        }
    }

    pub fn insert(&mut self, id: FluentId) -> bool {
        let (block, bit) = (id.index() / BLOCK_BITS, id.index() % BLOCK_BITS);
        if block >= self.blocks.len() {
            self.blocks.resize(block + 1, 0);
        }
        let mask = 1u64 << bit;
        let was_set = self.blocks[block] & mask != 0;
        self.blocks[block] |= mask;
        !was_set
    }

    pub fn remove(&mut self, id: FluentId) -> bool {
        let (block, bit) = (id.index() / BLOCK_BITS, id.index() % BLOCK_BITS);
        if block >= self.blocks.len() {
            return false;
        }
        let mask = 1u64 << bit;
        let was_set = self.blocks[block] & mask != 0;
        self.blocks[block] &= !mask;
        self.normalize();
        was_set
    }

    pub fn contains(&self, id: FluentId) -> bool {
        let (block, bit) = (id.index() / BLOCK_BITS, id.index() % BLOCK_BITS);
        self.blocks.get(block).is_some_and(|b| b & (1u64 << bit) != 0)
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn len(&self) -> usize {
        self.blocks.iter().map(|b| b.count_ones() as usize).sum()
    }

    /// Largest id in the set, if any.
    pub fn max_id(&self) -> Option<FluentId> {
        let block = self.blocks.len().checked_sub(1)?;
        let bit = BLOCK_BITS - 1 - self.blocks[block].leading_zeros() as usize;
        Some(FluentId::new(block * BLOCK_BITS + bit))
    }

    pub fn is_subset(&self, other: &FluentSet) -> bool {
        if self.blocks.len() > other.blocks.len() {
            return false;
        }
        self.blocks.iter().zip(&other.blocks).all(|(a, b)| a & !b == 0)
    }

    pub fn intersects(&self, other: &FluentSet) -> bool {
        self.blocks.iter().zip(&other.blocks).any(|(a, b)| a & b != 0)
    }

    pub fn union_with(&mut self, other: &FluentSet) {
        if other.blocks.len() > self.blocks.len() {
            self.blocks.resize(other.blocks.len(), 0);
        }
        for (a, b) in self.blocks.iter_mut().zip(&other.blocks) {
            *a |= b;
        }
    }

    pub fn difference_with(&mut self, other: &FluentSet) {
        for (a, b) in self.blocks.iter_mut().zip(&other.blocks) {
            *a &= !b;
        }
        self.normalize();
    }

    pub fn intersect_with(&mut self, other: &FluentSet) {
        if self.blocks.len() > other.blocks.len() {
            self.blocks.truncate(other.blocks.len());
        }
        for (a, b) in self.blocks.iter_mut().zip(&other.blocks) {
            *a &= b;
        }
        self.normalize();
    }

    pub fn union(&self, other: &FluentSet) -> FluentSet {
        let mut out = self.clone();
        out.union_with(other);
        out
    }

    pub fn difference(&self, other: &FluentSet) -> FluentSet {
        let mut out = self.clone();
        out.difference_with(other);
        out
    }

    pub fn intersection(&self, other: &FluentSet) -> FluentSet {
        let mut out = self.clone();
        out.intersect_with(other);
        out
    }

    /// Iterates members in ascending id order.
    pub fn iter(&self) -> Iter<'_> {
        Iter { set: self, block: 0, bits: self.blocks.first().copied().unwrap_or(0) }
    }
}

pub struct Iter<'a> {
    set: &'a FluentSet,
    block: usize,
    bits: u64,
}

impl Iterator for Iter<'_> {
    type Item = FluentId;

    fn next(&mut self) -> Option<FluentId> {
        while self.bits == 0 {
            self.block += 1;
            if self.block >= self.set.blocks.len() {
                return None;
            }
            self.bits = self.set.blocks[self.block];
        }
        let bit = self.bits.trailing_zeros() as usize;
        self.bits &= self.bits - 1;
        Some(FluentId::new(self.block * BLOCK_BITS + bit))
    }
}

impl<'a> IntoIterator for &'a FluentSet {
    type Item = FluentId;
    type IntoIter = Iter<'a>;

    fn into_iter(self) -> Iter<'a> {
        self.iter()
    }
}

impl FromIterator<FluentId> for FluentSet {
    fn from_iter<I: IntoIterator<Item = FluentId>>(iter: I) -> Self {
        FluentSet::from_ids(iter)
    }
}

impl fmt::Debug for FluentSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter().map(|id| id.index())).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    fn ids(v: &[usize]) -> FluentSet {
        v.iter().map(|&i| FluentId::new(i)).collect()
    }

    #[test]
    fn insert_remove_contains() {
        let mut s = FluentSet::new();
        assert!(s.insert(FluentId::new(3)));
        assert!(!s.insert(FluentId::new(3)));
        assert!(s.contains(FluentId::new(3)));
        assert!(!s.contains(FluentId::new(64)));
        assert!(s.insert(FluentId::new(200)));
        assert_eq!(s.len(), 2);
        assert!(s.remove(FluentId::new(200)));
        assert!(!s.remove(FluentId::new(200)));
        assert_eq!(s.max_id(), Some(FluentId::new(3)));
    }

    #[test]
    fn normalization_keeps_eq_and_hash_structural() {
        let mut a = ids(&[1, 130]);
        a.remove(FluentId::new(130));
        let b = ids(&[1]);
        assert_eq!(a, b);
    }

    #[test]
    fn iter_ascending() {
        let s = ids(&[70, 2, 64, 5]);
        let got: Vec<usize> = s.iter().map(|i| i.index()).collect();
        assert_eq!(got, vec![2, 5, 64, 70]);
    }

    #[test]
    fn empty_set_relations() {
        let e = FluentSet::new();
        let s = ids(&[4]);
        assert!(e.is_subset(&s));
        assert!(e.is_subset(&e));
        assert!(!e.intersects(&s));
        assert_eq!(e.max_id(), None);
    }

    proptest! {
        #[test]
        fn matches_btreeset_model(a in prop::collection::btree_set(0usize..200, 0..40),
                                  b in prop::collection::btree_set(0usize..200, 0..40)) {
            let sa: FluentSet = a.iter().map(|&i| FluentId::new(i)).collect();
            let sb: FluentSet = b.iter().map(|&i| FluentId::new(i)).collect();

            let union: BTreeSet<usize> = a.union(&b).copied().collect();
            let inter: BTreeSet<usize> = a.intersection(&b).copied().collect();
            let diff: BTreeSet<usize> = a.difference(&b).copied().collect();

            prop_assert_eq!(sa.union(&sb).iter().map(|i| i.index()).collect::<BTreeSet<_>>(), union);
            prop_assert_eq!(sa.intersection(&sb).iter().map(|i| i.index()).collect::<BTreeSet<_>>(), inter);
            prop_assert_eq!(sa.difference(&sb).iter().map(|i| i.index()).collect::<BTreeSet<_>>(), diff);
            prop_assert_eq!(sa.is_subset(&sb), a.is_subset(&b));
            prop_assert_eq!(sa.intersects(&sb), !a.is_disjoint(&b));
            prop_assert_eq!(sa.len(), a.len());
        }
    }
}

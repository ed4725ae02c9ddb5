// SPDX-License-Identifier: MIT
//! Small node sets packed into a machine word.

use std::fmt;

/// Hard limit on the number of nodes any graph may carry.
pub const MAX_NODES: usize = 32;

/// A set of node indices `0..32`, one bit per node.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct NodeSet(pub u32);

impl NodeSet {
    pub const EMPTY: NodeSet = NodeSet(0);

    pub fn singleton(i: usize) -> Self {
        debug_assert!(i < MAX_NODES);
        NodeSet(1 << i)
    }

    /// All nodes `0..n`.
    pub fn full(n: usize) -> Self {
        if n >= 32 {
            NodeSet(u32::MAX)
        } else {
            NodeSet((1u32 << n) - 1)
        }
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn contains(self, i: usize) -> bool {
        i < MAX_NODES && self.0 & (1 << i) != 0
    }

    #[must_use]
    pub fn with(self, i: usize) -> Self {
        NodeSet(self.0 | (1 << i))
    }

    #[must_use]
    pub fn without(self, i: usize) -> Self {
        NodeSet(self.0 & !(1 << i))
    }

    pub fn insert(&mut self, i: usize) {
        self.0 |= 1 << i;
    }

    pub fn remove(&mut self, i: usize) {
        self.0 &= !(1 << i);
    }

    #[must_use]
    pub fn union(self, o: NodeSet) -> Self {
        NodeSet(self.0 | o.0)
    }

    #[must_use]
    pub fn intersection(self, o: NodeSet) -> Self {
        NodeSet(self.0 & o.0)
    }

    #[must_use]
    pub fn difference(self, o: NodeSet) -> Self {
        NodeSet(self.0 & !o.0)
    }

    pub fn is_disjoint(self, o: NodeSet) -> bool {
        self.0 & o.0 == 0
    }

    pub fn is_subset(self, o: NodeSet) -> bool {
        self.0 & !o.0 == 0
    }

    pub fn first(self) -> Option<usize> {
        if self.0 == 0 {
            None
        } else {
            Some(self.0.trailing_zeros() as usize)
        }
    }

    pub fn iter(self) -> NodeSetIter {
        NodeSetIter(self.0)
    }

    /// Every subset of `self`, including the empty set and `self`, in
    /// increasing order of the packed value.
    pub fn subsets(self) -> Subsets {
        Subsets { mask: self.0, next: Some(0) }
    }

    /// Nonempty subsets only.
    pub fn nonempty_subsets(self) -> impl Iterator<Item = NodeSet> {
        self.subsets().filter(|s| !s.is_empty())
    }
}

impl fmt::Debug for NodeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl IntoIterator for NodeSet {
    type Item = usize;
    type IntoIter = NodeSetIter;
    fn into_iter(self) -> NodeSetIter {
        self.iter()
    }
}

impl FromIterator<usize> for NodeSet {
    fn from_iter<I: IntoIterator<Item = usize>>(it: I) -> Self {
        it.into_iter().fold(NodeSet::EMPTY, |s, i| s.with(i))
    }
}

pub struct NodeSetIter(u32);

impl Iterator for NodeSetIter {
    type Item = usize;
    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let i = self.0.trailing_zeros();
        self.0 &= self.0 - 1;
        Some(i as usize)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for NodeSetIter {}

/// Subset enumeration via the `(s - mask) & mask` trick.
pub struct Subsets {
    mask: u32,
    next: Option<u32>,
}

impl Iterator for Subsets {
    type Item = NodeSet;
    fn next(&mut self) -> Option<NodeSet> {
        let cur = self.next?;
        self.next = if cur == self.mask {
            None
        } else {
            Some(cur.wrapping_sub(self.mask) & self.mask)
        };
        Some(NodeSet(cur))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subsets_of_three_bits() {
        let s = NodeSet::from_iter([0, 2, 5]);
        let subs: Vec<_> = s.subsets().collect();
        assert_eq!(subs.len(), 8);
        assert_eq!(subs[0], NodeSet::EMPTY);
        assert_eq!(*subs.last().unwrap(), s);
        assert!(subs.iter().all(|x| x.is_subset(s)));
        assert!(subs.windows(2).all(|w| w[0].0 < w[1].0));
    }

    #[test]
    fn empty_set_has_one_subset() {
        assert_eq!(NodeSet::EMPTY.subsets().count(), 1);
        assert_eq!(NodeSet::EMPTY.nonempty_subsets().count(), 0);
    }

    #[test]
    fn set_algebra() {
        let a = NodeSet::from_iter([1, 2]);
        let b = NodeSet::from_iter([2, 3]);
        assert_eq!(a.union(b), NodeSet::from_iter([1, 2, 3]));
        assert_eq!(a.intersection(b), NodeSet::singleton(2));
        assert_eq!(a.difference(b), NodeSet::singleton(1));
        assert!(!a.is_disjoint(b));
        assert_eq!(a.iter().collect::<Vec<_>>(), vec![1, 2]);
        assert_eq!(NodeSet::full(4).len(), 4);
    }
}

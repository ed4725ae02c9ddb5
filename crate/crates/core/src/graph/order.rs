// SPDX-License-Identifier: MIT
//! Strict partial orders over node indices.
//!
//! `a > b` reads "a is above b". In the minimal order of a graph the nodes
//! above `b` are exactly its ancestors.

use std::fmt;

use super::{Edge, Graph, GraphError, Mark};
use crate::nodeset::NodeSet;
use crate::Verdict;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PartialOrder {
    /// `above[b]` holds every `a` with `a > b`.
    above: Vec<NodeSet>,
}

impl PartialOrder {
    /// The empty relation: all nodes pairwise incomparable.
    pub fn antichain(n: usize) -> Self {
        PartialOrder { above: vec![NodeSet::EMPTY; n] }
    }

    /// Transitive closure of the given `(a, b)` pairs meaning `a > b`.
    /// Rejects pairs that close into a cycle.
    pub fn from_pairs(n: usize, pairs: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut ord = PartialOrder::antichain(n);
        for &(a, b) in pairs {
            if a >= n || b >= n {
                return Err(GraphError::NodeOutOfRange(a.max(b)));
            }
            ord.above[b].insert(a);
        }
        ord.close();
        for v in 0..n {
            if ord.above[v].contains(v) {
                return Err(GraphError::InvalidOrder(format!("node {v} lies above itself")));
            }
        }
        Ok(ord)
    }

    /// Builds from an explicit `above` table; the table must already be
    /// transitive and irreflexive.
    pub fn from_above(above: Vec<NodeSet>) -> Result<Self, GraphError> {
        let ord = PartialOrder { above };
        let mut closed = ord.clone();
        closed.close();
        if closed != ord {
            return Err(GraphError::InvalidOrder("relation is not transitive".into()));
        }
        if (0..ord.n()).any(|v| ord.above[v].contains(v)) {
            return Err(GraphError::InvalidOrder("relation is not irreflexive".into()));
        }
        Ok(ord)
    }

    fn close(&mut self) {
        // Warshall over the bitset rows.
        let n = self.n();
        for k in 0..n {
            for b in 0..n {
                if self.above[b].contains(k) {
                    self.above[b] = self.above[b].union(self.above[k]);
                }
            }
        }
    }

    pub fn n(&self) -> usize {
        self.above.len()
    }

    /// `a > b`.
    pub fn greater(&self, a: usize, b: usize) -> bool {
        self.above[b].contains(a)
    }

    pub fn comparable(&self, a: usize, b: usize) -> bool {
        self.greater(a, b) || self.greater(b, a)
    }

    pub fn above(&self, b: usize) -> NodeSet {
        self.above[b]
    }

    pub fn below(&self, a: usize) -> NodeSet {
        (0..self.n()).filter(|&b| self.greater(a, b)).collect()
    }

    /// All pairs `(a, b)` with `a > b`, sorted.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> =
            (0..self.n()).flat_map(|b| self.above[b].iter().map(move |a| (a, b))).collect();
        out.sort();
        out
    }

    /// Adds `a > b` and closes, unless that would create a cycle.
    pub fn extended(&self, a: usize, b: usize) -> Option<PartialOrder> {
        if a == b || self.greater(b, a) {
            return None;
        }
        let mut next = self.clone();
        next.above[b].insert(a);
        next.close();
        Some(next)
    }

    pub fn render(&self, g: &Graph) -> String {
        let parts: Vec<String> =
            self.pairs().iter().map(|&(a, b)| format!("{}>{}", g.label(a), g.label(b))).collect();
        format!("{{{}}}", parts.join(", "))
    }
}

impl fmt::Debug for PartialOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.pairs().iter().map(|(a, b)| format!("{a}>{b}"))).finish()
    }
}

/// Order induced by ancestry alone: `a > b` iff `a ∈ an(b)`.
pub fn minimal_order(g: &Graph) -> Result<PartialOrder, GraphError> {
    g.require_ancestral()?;
    Ok(PartialOrder { above: g.ancestor_table() })
}

impl Graph {
    /// Every arrow `a -> b` has `a > b` and every arc joins incomparable
    /// nodes. The witness is the first offending edge.
    pub fn is_valid_order(&self, ord: &PartialOrder) -> Result<Verdict<Edge>, GraphError> {
        if ord.n() != self.n() {
            return Err(GraphError::DomainMismatch);
        }
        for e in self.edges() {
            let ok = match e.mark {
                Mark::Arrow => ord.greater(e.from, e.to),
                Mark::Arc => !ord.comparable(e.from, e.to),
            };
            if !ok {
                return Ok(Verdict::Fails(e));
            }
        }
        Ok(Verdict::Holds)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain4() -> Graph {
        Graph::from_edges(&["i", "k", "l", "j"], &[("i", "k"), ("l", "k"), ("j", "l")], &[])
    }

    #[test]
    fn minimal_order_of_chain() {
        let g = chain4();
        let (i, k, l, j) = (0, 1, 2, 3);
        let ord = minimal_order(&g).unwrap();
        let mut expect = vec![(i, k), (l, k), (j, l), (j, k)];
        expect.sort();
        assert_eq!(ord.pairs(), expect);
        assert!(!ord.comparable(i, l));
        assert!(!ord.comparable(i, j));
        assert!(g.is_valid_order(&ord).unwrap().holds());
    }

    #[test]
    fn minimal_order_ignores_arcs() {
        let g = Graph::from_edges(&["1", "2", "3", "4"], &[("3", "1"), ("4", "2")], &[("1", "2")]);
        let ord = minimal_order(&g).unwrap();
        assert_eq!(ord.pairs(), vec![(2, 0), (3, 1)]);
        assert!(!ord.comparable(0, 1));

        let bad = PartialOrder::from_pairs(4, &[(2, 0), (3, 1), (0, 1)]).unwrap();
        assert_eq!(
            g.is_valid_order(&bad).unwrap(),
            Verdict::Fails(Edge { from: 0, to: 1, mark: Mark::Arc })
        );
    }

    #[test]
    fn invalid_orders() {
        let g = chain4();
        let bad = PartialOrder::from_pairs(4, &[(1, 0)]).unwrap();
        assert_eq!(
            g.is_valid_order(&bad).unwrap(),
            Verdict::Fails(Edge { from: 0, to: 1, mark: Mark::Arrow })
        );
        assert!(PartialOrder::from_pairs(2, &[(0, 1), (1, 0)]).is_err());
        assert!(matches!(g.is_valid_order(&PartialOrder::antichain(3)), Err(GraphError::DomainMismatch)));
    }

    #[test]
    fn single_arrow() {
        let g = Graph::from_edges(&["a", "b"], &[("a", "b")], &[]);
        assert_eq!(minimal_order(&g).unwrap().pairs(), vec![(0, 1)]);
    }

    #[test]
    fn non_ancestral_rejected() {
        let mut g = Graph::new(["1", "3"]).unwrap();
        g.add_arrow(1, 0).unwrap();
        g.spouses[0].insert(1);
        g.spouses[1].insert(0);
        assert!(matches!(minimal_order(&g), Err(GraphError::NotAncestral(_))));
    }

    #[test]
    fn extension_respects_antisymmetry() {
        let ord = PartialOrder::from_pairs(3, &[(0, 1)]).unwrap();
        assert!(ord.extended(1, 0).is_none());
        let ext = ord.extended(1, 2).unwrap();
        assert!(ext.greater(0, 2));
    }
}

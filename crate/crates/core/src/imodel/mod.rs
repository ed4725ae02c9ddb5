// SPDX-License-Identifier: MIT
//! Explicit independence models over small universes.
//!
//! A triple `<A, B | C>` is encoded by giving each node a base-4 digit
//! (0 absent, 1 in A, 2 in B, 3 in C), so the models are dense bitsets over
//! `4^n` codes. Storage is symmetric: inserting `<A, B | C>` also inserts
//! `<B, A | C>`. Triples with an empty side hold by convention and are never
//! stored.
//!
//! Witnesses and listings follow the triple order `(A, B, C)` compared as
//! packed node bitsets.

mod format;
mod properties;
mod relations;

use std::fmt;

use thiserror::Error;

use crate::nodeset::NodeSet;
use crate::DEFAULT_MAX_NODES;

pub use format::{parse_model, write_model, ParsedModel};
pub use properties::{check_property, closure, PropertyId, Witness};
pub(crate) use relations::graph_model;
pub use relations::{
    converse_pairwise_markov, is_faithful, is_markovian, is_minimally_markovian, marginalize_model,
    orientation_faithful, path_stable, skeleton_of_model, v_stable, OrientationWitness, PathWitness,
    VWitness,
};

/// Largest universe a model may be built over, whatever bound is requested.
pub const HARD_MAX_NODES: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("universe has {n} nodes; the bound is {max}")]
    TooManyNodes { n: usize, max: usize },
    #[error("sets of a triple are not pairwise disjoint")]
    NotDisjoint,
    #[error("triple mentions nodes outside the universe")]
    OutOfRange,
    #[error("models or graphs are over different node sets")]
    UniverseMismatch,
    #[error("ordered property checked without an order")]
    MissingOrder,
    #[error("closure under {0:?} is not supported")]
    UnsupportedClosure(PropertyId),
    #[error("duplicate node label `{0}`")]
    DuplicateLabel(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// `<a, b | c>` with pairwise disjoint sets.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Triple {
    pub a: NodeSet,
    pub b: NodeSet,
    pub c: NodeSet,
}

impl Triple {
    pub fn new(a: NodeSet, b: NodeSet, c: NodeSet) -> Result<Self, ModelError> {
        if !a.is_disjoint(b) || !a.is_disjoint(c) || !b.is_disjoint(c) {
            return Err(ModelError::NotDisjoint);
        }
        Ok(Triple { a, b, c })
    }

    pub fn pair(i: usize, j: usize, c: NodeSet) -> Self {
        debug_assert!(i != j && !c.contains(i) && !c.contains(j));
        Triple { a: NodeSet::singleton(i), b: NodeSet::singleton(j), c }
    }

    pub fn swapped(self) -> Self {
        Triple { a: self.b, b: self.a, c: self.c }
    }

    pub fn is_trivial(&self) -> bool {
        self.a.is_empty() || self.b.is_empty()
    }

    pub fn support(&self) -> NodeSet {
        self.a.union(self.b).union(self.c)
    }

    /// Key of the documented triple order.
    pub fn key(&self) -> (u32, u32, u32) {
        (self.a.bits(), self.b.bits(), self.c.bits())
    }

    pub fn code(&self) -> u64 {
        spread(self.a) + 2 * spread(self.b) + 3 * spread(self.c)
    }

    pub fn from_code(code: u64, n: usize) -> Self {
        let mut t = Triple { a: NodeSet::EMPTY, b: NodeSet::EMPTY, c: NodeSet::EMPTY };
        for v in 0..n {
            match (code >> (2 * v)) & 3 {
                1 => t.a.insert(v),
                2 => t.b.insert(v),
                3 => t.c.insert(v),
                _ => {}
            }
        }
        t
    }

    pub fn render(&self, labels: &[String]) -> String {
        let set = |s: NodeSet| {
            let parts: Vec<&str> = s.iter().map(|v| labels[v].as_str()).collect();
            format!("{{{}}}", parts.join(","))
        };
        format!("{} _||_ {} | {}", set(self.a), set(self.b), set(self.c))
    }
}

impl fmt::Debug for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{:?}, {:?} | {:?}>", self.a, self.b, self.c)
    }
}

impl PartialOrd for Triple {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Triple {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.key().cmp(&other.key())
    }
}

/// Moves bit `v` of `s` to bit `2v`.
fn spread(s: NodeSet) -> u64 {
    let mut x = s.bits() as u64;
    x = (x | (x << 16)) & 0x0000_FFFF_0000_FFFF;
    x = (x | (x << 8)) & 0x00FF_00FF_00FF_00FF;
    x = (x | (x << 4)) & 0x0F0F_0F0F_0F0F_0F0F;
    x = (x | (x << 2)) & 0x3333_3333_3333_3333;
    x = (x | (x << 1)) & 0x5555_5555_5555_5555;
    x
}

/// Equality compares universes and statements; provenance is ignored.
#[derive(Clone)]
pub struct IndependenceModel {
    labels: Vec<String>,
    bits: Vec<u64>,
    provenance: Option<String>,
}

impl IndependenceModel {
    pub fn empty(labels: Vec<String>) -> Result<Self, ModelError> {
        IndependenceModel::empty_bounded(labels, DEFAULT_MAX_NODES)
    }

    pub fn empty_bounded(labels: Vec<String>, max_nodes: usize) -> Result<Self, ModelError> {
        let max = max_nodes.min(HARD_MAX_NODES);
        if labels.len() > max {
            return Err(ModelError::TooManyNodes { n: labels.len(), max });
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(ModelError::DuplicateLabel(l.clone()));
            }
        }
        let words = (1usize << (2 * labels.len())).div_ceil(64);
        Ok(IndependenceModel { labels, bits: vec![0; words], provenance: None })
    }

    /// Every disjoint triple.
    pub fn full(labels: Vec<String>) -> Result<Self, ModelError> {
        let n = labels.len();
        let mut m = IndependenceModel::empty_bounded(labels, HARD_MAX_NODES)?;
        for code in 0..(1u64 << (2 * n)) {
            let t = Triple::from_code(code, n);
            if !t.is_trivial() {
                m.set_code(code);
            }
        }
        Ok(m)
    }

    /// Labels `"1", "2", ...`.
    pub fn numbered(n: usize) -> Result<Self, ModelError> {
        IndependenceModel::empty((1..=n).map(|i| i.to_string()).collect())
    }

    pub fn with_provenance(mut self, p: impl Into<String>) -> Self {
        self.provenance = Some(p.into());
        self
    }

    pub fn provenance(&self) -> Option<&str> {
        self.provenance.as_deref()
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn all(&self) -> NodeSet {
        NodeSet::full(self.n())
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    fn get_code(&self, code: u64) -> bool {
        self.bits[(code / 64) as usize] >> (code % 64) & 1 == 1
    }

    fn set_code(&mut self, code: u64) -> bool {
        let w = &mut self.bits[(code / 64) as usize];
        let mask = 1u64 << (code % 64);
        let fresh = *w & mask == 0;
        *w |= mask;
        fresh
    }

    fn clear_code(&mut self, code: u64) {
        self.bits[(code / 64) as usize] &= !(1u64 << (code % 64));
    }

    /// Whether `<a, b | c>` is in the model. Trivial triples always are.
    /// The sets must be disjoint.
    pub fn contains(&self, a: NodeSet, b: NodeSet, c: NodeSet) -> bool {
        if a.is_empty() || b.is_empty() {
            return true;
        }
        debug_assert!(a.is_disjoint(b) && a.is_disjoint(c) && b.is_disjoint(c));
        self.get_code(spread(a) + 2 * spread(b) + 3 * spread(c))
    }

    pub fn holds(&self, t: &Triple) -> bool {
        self.contains(t.a, t.b, t.c)
    }

    /// Singleton statement `<i, j | c>`.
    pub fn pair(&self, i: usize, j: usize, c: NodeSet) -> bool {
        self.contains(NodeSet::singleton(i), NodeSet::singleton(j), c)
    }

    /// Stores a triple and its mirror without validation.
    pub(crate) fn set_raw(&mut self, a: NodeSet, b: NodeSet, c: NodeSet) -> bool {
        let fresh = self.set_code(spread(a) + 2 * spread(b) + 3 * spread(c));
        self.set_code(spread(b) + 2 * spread(a) + 3 * spread(c));
        fresh
    }

    /// Inserts `t` and its mirror. Returns whether `t` was new; trivial
    /// triples are accepted and ignored.
    pub fn insert(&mut self, t: Triple) -> Result<bool, ModelError> {
        let t = Triple::new(t.a, t.b, t.c)?;
        if !t.support().is_subset(self.all()) {
            return Err(ModelError::OutOfRange);
        }
        if t.is_trivial() {
            return Ok(false);
        }
        Ok(self.set_raw(t.a, t.b, t.c))
    }

    /// Inserts `t` alone, breaking storage symmetry. Only useful for
    /// exercising the symmetry check.
    pub fn insert_one_sided(&mut self, t: Triple) -> Result<bool, ModelError> {
        let t = Triple::new(t.a, t.b, t.c)?;
        if !t.support().is_subset(self.all()) {
            return Err(ModelError::OutOfRange);
        }
        Ok(!t.is_trivial() && self.set_code(t.code()))
    }

    /// Removes `t` and its mirror.
    pub fn remove(&mut self, t: &Triple) {
        if !t.is_trivial() {
            self.clear_code(t.code());
            self.clear_code(t.swapped().code());
        }
    }

    /// Stored triples in triple order.
    pub fn statements(&self) -> Vec<Triple> {
        let n = self.n();
        let mut out = Vec::new();
        for (w, &word) in self.bits.iter().enumerate() {
            let mut x = word;
            while x != 0 {
                let b = x.trailing_zeros() as u64;
                x &= x - 1;
                out.push(Triple::from_code(w as u64 * 64 + b, n));
            }
        }
        out.sort();
        out
    }

    /// One representative per mirror pair, the one with the smaller `A`.
    pub fn canonical_statements(&self) -> Vec<Triple> {
        self.statements()
            .into_iter()
            .filter(|t| t.a.bits() < t.b.bits() || !self.holds(&t.swapped()))
            .collect()
    }

    /// Stored singleton-pair triples in triple order.
    pub fn pair_statements(&self) -> Vec<Triple> {
        self.statements().into_iter().filter(|t| t.a.len() == 1 && t.b.len() == 1).collect()
    }

    /// Number of stored triples, counting both members of a mirror pair.
    pub fn len(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// First stored triple of `self` absent from `other`.
    pub fn first_missing_from(&self, other: &IndependenceModel) -> Option<Triple> {
        debug_assert_eq!(self.labels, other.labels);
        let n = self.n();
        let mut best: Option<Triple> = None;
        for (w, (&x, &y)) in self.bits.iter().zip(&other.bits).enumerate() {
            let mut d = x & !y;
            while d != 0 {
                let b = d.trailing_zeros() as u64;
                d &= d - 1;
                let t = Triple::from_code(w as u64 * 64 + b, n);
                if best.is_none_or(|cur| t < cur) {
                    best = Some(t);
                }
            }
        }
        best
    }

    pub fn is_subset(&self, other: &IndependenceModel) -> bool {
        self.bits.iter().zip(&other.bits).all(|(&x, &y)| x & !y == 0)
    }

    /// Same universe and same stored triples; provenance is ignored.
    pub fn same_statements(&self, other: &IndependenceModel) -> bool {
        self.labels == other.labels && self.bits == other.bits
    }

    pub fn union_with(&mut self, other: &IndependenceModel) -> Result<(), ModelError> {
        if self.labels != other.labels {
            return Err(ModelError::UniverseMismatch);
        }
        for (x, &y) in self.bits.iter_mut().zip(&other.bits) {
            *x |= y;
        }
        Ok(())
    }

    pub fn render_set(&self, s: NodeSet) -> String {
        let parts: Vec<&str> = s.iter().map(|v| self.label(v)).collect();
        format!("{{{}}}", parts.join(","))
    }

    pub fn render(&self, t: &Triple) -> String {
        t.render(&self.labels)
    }
}

impl PartialEq for IndependenceModel {
    fn eq(&self, other: &Self) -> bool {
        self.labels == other.labels && self.bits == other.bits
    }
}

impl Eq for IndependenceModel {}

impl fmt::Debug for IndependenceModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("IndependenceModel")
            .field("labels", &self.labels)
            .field("statements", &self.canonical_statements().iter().map(|t| self.render(t)).collect::<Vec<_>>())
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn code_round_trip() {
        let t = Triple::new(NodeSet::from_iter([0, 3]), NodeSet::singleton(1), NodeSet::singleton(5)).unwrap();
        assert_eq!(Triple::from_code(t.code(), 6), t);
        assert_eq!(spread(NodeSet(0b1011)), 0b01_00_01_01);
    }

    #[test]
    fn symmetric_storage() {
        let mut m = IndependenceModel::numbered(3).unwrap();
        let t = Triple::pair(0, 1, NodeSet::singleton(2));
        assert!(m.insert(t).unwrap());
        assert!(m.holds(&t.swapped()));
        assert!(!m.insert(t.swapped()).unwrap());
        assert_eq!(m.len(), 2);
        assert_eq!(m.canonical_statements(), vec![t]);
        m.remove(&t.swapped());
        assert!(m.is_empty());
    }

    #[test]
    fn trivial_triples_hold_implicitly() {
        let m = IndependenceModel::numbered(2).unwrap();
        assert!(m.contains(NodeSet::EMPTY, NodeSet::singleton(1), NodeSet::EMPTY));
        assert!(!m.pair(0, 1, NodeSet::EMPTY));
    }

    #[test]
    fn bounds_and_validation() {
        assert!(matches!(IndependenceModel::numbered(9), Err(ModelError::TooManyNodes { .. })));
        assert!(IndependenceModel::empty_bounded((0..10).map(|i| i.to_string()).collect(), 10).is_ok());
        assert!(Triple::new(NodeSet::singleton(0), NodeSet::singleton(0), NodeSet::EMPTY).is_err());
        let mut m = IndependenceModel::numbered(2).unwrap();
        assert!(m.insert(Triple::pair(0, 3, NodeSet::EMPTY)).is_err());
    }

    #[test]
    fn full_model_counts() {
        // Disjoint (A, B, C) with A, B nonempty over n nodes: 4^n - 2*3^n + 2^n.
        let m = IndependenceModel::full((0..4).map(|i| i.to_string()).collect()).unwrap();
        assert_eq!(m.len(), 256 - 2 * 81 + 16);
    }

    #[test]
    fn missing_triple_is_first_in_order() {
        let mut a = IndependenceModel::numbered(3).unwrap();
        a.insert(Triple::pair(1, 2, NodeSet::EMPTY)).unwrap();
        a.insert(Triple::pair(0, 2, NodeSet::singleton(1))).unwrap();
        let b = IndependenceModel::numbered(3).unwrap();
        assert_eq!(a.first_missing_from(&b), Some(Triple::pair(0, 2, NodeSet::singleton(1))));
        assert!(b.is_subset(&a));
    }
}

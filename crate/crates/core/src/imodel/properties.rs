// SPDX-License-Identifier: MIT
//! The nine structural properties and closure under the monotone ones.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{IndependenceModel, ModelError, Triple};
use crate::graph::PartialOrder;
use crate::nodeset::NodeSet;
use crate::Verdict;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PropertyId {
    Symmetry,
    Decomposition,
    WeakUnion,
    Contraction,
    Intersection,
    Composition,
    SingletonTransitivity,
    OrderedUpward,
    OrderedDownward,
}

impl PropertyId {
    pub const ALL: [PropertyId; 9] = [
        PropertyId::Symmetry,
        PropertyId::Decomposition,
        PropertyId::WeakUnion,
        PropertyId::Contraction,
        PropertyId::Intersection,
        PropertyId::Composition,
        PropertyId::SingletonTransitivity,
        PropertyId::OrderedUpward,
        PropertyId::OrderedDownward,
    ];

    pub const SEMI_GRAPHOID: [PropertyId; 4] =
        [PropertyId::Symmetry, PropertyId::Decomposition, PropertyId::WeakUnion, PropertyId::Contraction];

    pub fn needs_order(self) -> bool {
        matches!(self, PropertyId::OrderedUpward | PropertyId::OrderedDownward)
    }

    pub fn name(self) -> &'static str {
        match self {
            PropertyId::Symmetry => "symmetry",
            PropertyId::Decomposition => "decomposition",
            PropertyId::WeakUnion => "weak-union",
            PropertyId::Contraction => "contraction",
            PropertyId::Intersection => "intersection",
            PropertyId::Composition => "composition",
            PropertyId::SingletonTransitivity => "singleton-transitivity",
            PropertyId::OrderedUpward => "ordered-upward",
            PropertyId::OrderedDownward => "ordered-downward",
        }
    }
}

impl fmt::Display for PropertyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PropertyId {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        PropertyId::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| format!("unknown property `{s}`"))
    }
}

/// A concrete violation: every premise is in the model and every missing
/// triple is not. For singleton-transitivity the two missing triples are the
/// alternatives of the disjunctive conclusion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub property: PropertyId,
    pub premises: Vec<Triple>,
    pub missing: Vec<Triple>,
}

impl Witness {
    pub fn reproduces(&self, j: &IndependenceModel) -> bool {
        self.premises.iter().all(|t| j.holds(t)) && self.missing.iter().all(|t| !j.holds(t))
    }

    pub fn render(&self, j: &IndependenceModel) -> String {
        let list = |ts: &[Triple]| ts.iter().map(|t| j.render(t)).collect::<Vec<_>>().join("; ");
        format!("{}: holds [{}] but lacks [{}]", self.property, list(&self.premises), list(&self.missing))
    }
}

fn is_pair(t: &Triple) -> bool {
    t.a.len() == 1 && t.b.len() == 1
}

fn single(s: NodeSet) -> usize {
    s.first().unwrap()
}

/// Proper nonempty subsets in increasing packed order.
fn proper_subsets(s: NodeSet) -> impl Iterator<Item = NodeSet> {
    s.nonempty_subsets().filter(move |&x| x != s)
}

fn upward_candidates<'a>(ord: &'a PartialOrder, t: &Triple, all: NodeSet) -> impl Iterator<Item = usize> + 'a {
    let (i, j) = (single(t.a), single(t.b));
    all.difference(t.support()).iter().filter(move |&k| ord.greater(k, i) || ord.greater(k, j))
}

fn downward_candidates<'a>(ord: &'a PartialOrder, t: &'a Triple) -> impl Iterator<Item = usize> + 'a {
    let (i, j) = (single(t.a), single(t.b));
    t.c.iter().filter(move |&k| {
        !ord.greater(k, i) && !ord.greater(k, j) && t.c.without(k).iter().all(|l| !ord.greater(k, l))
    })
}

/// Checks one property; the witness is the first violation in triple order.
pub fn check_property(
    j: &IndependenceModel,
    p: PropertyId,
    ord: Option<&PartialOrder>,
) -> Result<Verdict<Witness>, ModelError> {
    if p.needs_order() && ord.is_none() {
        return Err(ModelError::MissingOrder);
    }
    if let Some(o) = ord {
        if o.n() != j.n() {
            return Err(ModelError::UniverseMismatch);
        }
    }
    let all = j.all();
    let fail = |premises: Vec<Triple>, missing: Vec<Triple>| {
        Ok(Verdict::Fails(Witness { property: p, premises, missing }))
    };
    for t in j.statements() {
        let (a, b, c) = (t.a, t.b, t.c);
        match p {
            PropertyId::Symmetry => {
                if !j.holds(&t.swapped()) {
                    return fail(vec![t], vec![t.swapped()]);
                }
            }
            PropertyId::Decomposition => {
                for b2 in proper_subsets(b) {
                    let need = Triple { a, b: b2, c };
                    if !j.holds(&need) {
                        return fail(vec![t], vec![need]);
                    }
                }
            }
            PropertyId::WeakUnion => {
                for d in proper_subsets(b) {
                    let need = Triple { a, b: b.difference(d), c: c.union(d) };
                    if !j.holds(&need) {
                        return fail(vec![t], vec![need]);
                    }
                }
            }
            PropertyId::Contraction => {
                for d in c.nonempty_subsets() {
                    let other = Triple { a, b: d, c: c.difference(d) };
                    let need = Triple { a, b: b.union(d), c: c.difference(d) };
                    if j.holds(&other) && !j.holds(&need) {
                        return fail(vec![t, other], vec![need]);
                    }
                }
            }
            PropertyId::Intersection => {
                for d in c.nonempty_subsets() {
                    let other = Triple { a, b: d, c: c.difference(d).union(b) };
                    let need = Triple { a, b: b.union(d), c: c.difference(d) };
                    if j.holds(&other) && !j.holds(&need) {
                        return fail(vec![t, other], vec![need]);
                    }
                }
            }
            PropertyId::Composition => {
                for d in all.difference(t.support()).nonempty_subsets() {
                    let other = Triple { a, b: d, c };
                    let need = Triple { a, b: b.union(d), c };
                    if j.holds(&other) && !j.holds(&need) {
                        return fail(vec![t, other], vec![need]);
                    }
                }
            }
            PropertyId::SingletonTransitivity => {
                if !is_pair(&t) {
                    continue;
                }
                let (i, jj) = (single(a), single(b));
                for k in all.difference(t.support()) {
                    let up = Triple { a, b, c: c.with(k) };
                    if !j.holds(&up) {
                        continue;
                    }
                    let ik = Triple::pair(i, k, c);
                    let jk = Triple::pair(jj, k, c);
                    if !j.holds(&ik) && !j.holds(&jk) {
                        return fail(vec![t, up], vec![ik, jk]);
                    }
                }
            }
            PropertyId::OrderedUpward => {
                if !is_pair(&t) {
                    continue;
                }
                for k in upward_candidates(ord.unwrap(), &t, all) {
                    let need = Triple { a, b, c: c.with(k) };
                    if !j.holds(&need) {
                        return fail(vec![t], vec![need]);
                    }
                }
            }
            PropertyId::OrderedDownward => {
                if !is_pair(&t) {
                    continue;
                }
                for k in downward_candidates(ord.unwrap(), &t) {
                    let need = Triple { a, b, c: c.without(k) };
                    if !j.holds(&need) {
                        return fail(vec![t], vec![need]);
                    }
                }
            }
        }
    }
    Ok(Verdict::Holds)
}

/// Least superset of `j` closed under the given rules. Symmetry is implied
/// by storage. Singleton-transitivity and ordered downward-stability are
/// refused: one concludes a disjunction, the other removes conditioning
/// nodes and is not a forward rule on the generated statements.
pub fn closure(
    j: &IndependenceModel,
    props: &[PropertyId],
    ord: Option<&PartialOrder>,
) -> Result<IndependenceModel, ModelError> {
    for &p in props {
        if matches!(p, PropertyId::SingletonTransitivity | PropertyId::OrderedDownward) {
            return Err(ModelError::UnsupportedClosure(p));
        }
        if p.needs_order() && ord.is_none() {
            return Err(ModelError::MissingOrder);
        }
    }
    if let Some(o) = ord {
        if o.n() != j.n() {
            return Err(ModelError::UniverseMismatch);
        }
    }
    let has = |p: PropertyId| props.contains(&p);
    let all = j.all();
    let mut out = j.clone();
    loop {
        let mut new: Vec<Triple> = Vec::new();
        for t in out.statements() {
            let (a, b, c) = (t.a, t.b, t.c);
            if has(PropertyId::Symmetry) {
                new.push(t.swapped());
            }
            if has(PropertyId::Decomposition) {
                new.extend(proper_subsets(b).map(|b2| Triple { a, b: b2, c }));
            }
            if has(PropertyId::WeakUnion) {
                new.extend(proper_subsets(b).map(|d| Triple { a, b: b.difference(d), c: c.union(d) }));
            }
            if has(PropertyId::Contraction) {
                for d in c.nonempty_subsets() {
                    if out.holds(&Triple { a, b: d, c: c.difference(d) }) {
                        new.push(Triple { a, b: b.union(d), c: c.difference(d) });
                    }
                }
            }
            if has(PropertyId::Intersection) {
                for d in c.nonempty_subsets() {
                    if out.holds(&Triple { a, b: d, c: c.difference(d).union(b) }) {
                        new.push(Triple { a, b: b.union(d), c: c.difference(d) });
                    }
                }
            }
            if has(PropertyId::Composition) {
                for d in all.difference(t.support()).nonempty_subsets() {
                    if out.holds(&Triple { a, b: d, c }) {
                        new.push(Triple { a, b: b.union(d), c });
                    }
                }
            }
            if has(PropertyId::OrderedUpward) && is_pair(&t) {
                new.extend(upward_candidates(ord.unwrap(), &t, all).map(|k| Triple { a, b, c: c.with(k) }));
            }
        }
        let mut changed = false;
        // Storage adds the mirror of every conclusion.
        for t in new {
            changed |= !out.holds(&t) && out.set_raw(t.a, t.b, t.c);
        }
        if !changed {
            break;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{minimal_order, Graph};
    use crate::separation::induced_model;

    fn chain4() -> Graph {
        Graph::from_edges(&["i", "k", "l", "j"], &[("i", "k"), ("l", "k"), ("j", "l")], &[])
    }

    fn j_chain() -> IndependenceModel {
        let mut m = induced_model(&chain4()).unwrap();
        m.insert(Triple::pair(0, 3, NodeSet::singleton(1))).unwrap();
        m
    }

    #[test]
    fn chain_violates_singleton_transitivity() {
        let j = j_chain();
        let w = check_property(&j, PropertyId::SingletonTransitivity, None).unwrap().into_witness().unwrap();
        // (i, j, C = ∅, k)
        assert_eq!(w.premises, vec![Triple::pair(0, 3, NodeSet::EMPTY), Triple::pair(0, 3, NodeSet::singleton(1))]);
        assert_eq!(w.missing, vec![Triple::pair(0, 1, NodeSet::EMPTY), Triple::pair(3, 1, NodeSet::EMPTY)]);
        assert!(w.reproduces(&j));
    }

    #[test]
    fn chain_is_ordered_stable() {
        let j = j_chain();
        let ord = minimal_order(&chain4()).unwrap();
        assert!(check_property(&j, PropertyId::OrderedUpward, Some(&ord)).unwrap().holds());
        assert!(check_property(&j, PropertyId::OrderedDownward, Some(&ord)).unwrap().holds());
        assert!(matches!(
            check_property(&j, PropertyId::OrderedUpward, None),
            Err(ModelError::MissingOrder)
        ));
    }

    #[test]
    fn graph_models_satisfy_everything() {
        let g = chain4();
        let j = induced_model(&g).unwrap();
        let ord = minimal_order(&g).unwrap();
        for p in PropertyId::ALL {
            assert!(check_property(&j, p, Some(&ord)).unwrap().holds(), "{p}");
        }
    }

    #[test]
    fn symmetry_witness() {
        let mut j = IndependenceModel::numbered(2).unwrap();
        j.insert_one_sided(Triple::pair(1, 0, NodeSet::EMPTY)).unwrap();
        let w = check_property(&j, PropertyId::Symmetry, None).unwrap().into_witness().unwrap();
        assert_eq!(w.missing, vec![Triple::pair(0, 1, NodeSet::EMPTY)]);
    }

    #[test]
    fn closure_basics() {
        let empty = IndependenceModel::numbered(3).unwrap();
        assert!(closure(&empty, &PropertyId::SEMI_GRAPHOID, None).unwrap().is_empty());

        // a < c: c lies above a, so <a, b | ∅> gains <a, b | c>.
        let mut j = IndependenceModel::empty(vec!["a".into(), "b".into(), "c".into()]).unwrap();
        j.insert(Triple::pair(0, 1, NodeSet::EMPTY)).unwrap();
        let ord = PartialOrder::from_pairs(3, &[(2, 0)]).unwrap();
        let c = closure(&j, &[PropertyId::OrderedUpward], Some(&ord)).unwrap();
        assert!(c.pair(0, 1, NodeSet::singleton(2)));
        assert_eq!(c.len(), 4);

        assert!(matches!(
            closure(&j, &[PropertyId::OrderedDownward], Some(&ord)),
            Err(ModelError::UnsupportedClosure(_))
        ));
        assert!(matches!(
            closure(&j, &[PropertyId::SingletonTransitivity], None),
            Err(ModelError::UnsupportedClosure(_))
        ));
    }

    #[test]
    fn names_round_trip() {
        for p in PropertyId::ALL {
            assert_eq!(p.name().parse::<PropertyId>().unwrap(), p);
        }
    }
}

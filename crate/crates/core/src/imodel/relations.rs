// SPDX-License-Identifier: MIT
//! Relations between a model and a graph, and the stability conditions that
//! only look at the model.

use super::{IndependenceModel, ModelError, Triple, HARD_MAX_NODES};
use crate::graph::{Graph, Skeleton};
use crate::nodeset::NodeSet;
use crate::separation::{induced_model_bounded, reachable, SeparationError};
use crate::Verdict;

fn check_universe(j: &IndependenceModel, g: &Graph) -> Result<(), ModelError> {
    if j.labels() != g.labels() {
        return Err(ModelError::UniverseMismatch);
    }
    Ok(())
}

pub(crate) fn graph_model(g: &Graph) -> Result<IndependenceModel, ModelError> {
    induced_model_bounded(g, HARD_MAX_NODES).map_err(|e| match e {
        SeparationError::Model(m) => m,
        other => unreachable!("separation over a whole graph cannot fail with {other}"),
    })
}

/// Edge `i – j` iff no `C` gives `<i, j | C>`.
pub fn skeleton_of_model(j: &IndependenceModel) -> Skeleton {
    let mut sk = Skeleton::empty(j.labels().to_vec());
    let all = j.all();
    for a in 0..j.n() {
        for b in a + 1..j.n() {
            let rest = all.without(a).without(b);
            if !rest.subsets().any(|c| j.pair(a, b, c)) {
                sk.add_edge(a, b);
            }
        }
    }
    sk
}

/// `J(G) ⊆ J`. Witness: the first separation statement of `g` missing from `j`.
pub fn is_markovian(j: &IndependenceModel, g: &Graph) -> Result<Verdict<Triple>, ModelError> {
    check_universe(j, g)?;
    Ok(graph_model(g)?.first_missing_from(j).into())
}

/// `J = J(G)`.
pub fn is_faithful(j: &IndependenceModel, g: &Graph) -> Result<bool, ModelError> {
    check_universe(j, g)?;
    Ok(graph_model(g)?.same_statements(j))
}

/// Markovian with matching skeletons.
pub fn is_minimally_markovian(j: &IndependenceModel, g: &Graph) -> Result<bool, ModelError> {
    Ok(is_markovian(j, g)?.holds() && g.skeleton() == skeleton_of_model(j))
}

/// No adjacent pair `i ∼ j` of `g` has `<i, j | an(i, j)>` in the model.
/// Witness: the first such pair with `i < j`.
pub fn converse_pairwise_markov(
    j: &IndependenceModel,
    g: &Graph,
) -> Result<Verdict<(usize, usize)>, ModelError> {
    check_universe(j, g)?;
    for (a, b) in g.skeleton().edges() {
        if j.pair(a, b, g.anc_pair(a, b)) {
            return Ok(Verdict::Fails((a, b)));
        }
    }
    Ok(Verdict::Holds)
}

/// V-configuration `<i, k, j>` of the model skeleton with `<i, j | C>` and
/// `<i, j | C ∪ {k}>` both in the model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VWitness {
    pub i: usize,
    pub k: usize,
    pub j: usize,
    pub c: NodeSet,
}

impl VWitness {
    pub fn render(&self, m: &IndependenceModel) -> String {
        format!("({},{},{} | {})", m.label(self.i), m.label(self.k), m.label(self.j), m.render_set(self.c))
    }
}

pub fn v_stable(j: &IndependenceModel) -> Verdict<VWitness> {
    let sk = skeleton_of_model(j);
    for (i, k, jj) in sk.v_configurations() {
        let rest = j.all().without(i).without(jj).without(k);
        for c in rest.subsets() {
            if j.pair(i, jj, c) && j.pair(i, jj, c.with(k)) {
                return Verdict::Fails(VWitness { i, k, j: jj, c });
            }
        }
    }
    Verdict::Holds
}

/// Skeleton path `<i, i_1, ..., i_r, k, j>` with `i ≁ j` and every `i_s ∼ j`,
/// together with a set `C` such that `<i, j | U ∪ C>` and
/// `<i, j | U ∪ C ∪ {k}>` hold for `U = {i_1, ..., i_r}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathWitness {
    /// `i, i_1, ..., i_r, k, j`.
    pub path: Vec<usize>,
    pub c: NodeSet,
}

impl PathWitness {
    pub fn r(&self) -> usize {
        self.path.len() - 3
    }

    pub fn render(&self, m: &IndependenceModel) -> String {
        let parts: Vec<&str> = self.path.iter().map(|&v| m.label(v)).collect();
        format!("<{}> with C = {}", parts.join(","), m.render_set(self.c))
    }
}

/// Candidate prefixes `i, i_1, ..., i_r, k` for a nonadjacent pair, every
/// node after `i` a neighbour of `j`. Sorted by length, then lexicographically.
fn discriminating_prefixes(sk: &Skeleton, i: usize, j: usize) -> Vec<Vec<usize>> {
    let allowed = sk.neighbors(j).without(i);
    let mut out = Vec::new();
    let mut stack = vec![i];
    fn go(sk: &Skeleton, allowed: NodeSet, stack: &mut Vec<usize>, used: NodeSet, out: &mut Vec<Vec<usize>>) {
        let last = *stack.last().unwrap();
        for next in sk.neighbors(last).intersection(allowed).difference(used) {
            stack.push(next);
            out.push(stack.clone());
            go(sk, allowed, stack, used.with(next), out);
            stack.pop();
        }
    }
    go(sk, allowed, &mut stack, NodeSet::singleton(i), &mut out);
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}

pub fn path_stable(j: &IndependenceModel) -> Verdict<PathWitness> {
    let sk = skeleton_of_model(j);
    let all = j.all();
    for i in 0..j.n() {
        for jj in 0..j.n() {
            if i == jj || sk.adjacent(i, jj) {
                continue;
            }
            for prefix in discriminating_prefixes(&sk, i, jj) {
                let k = *prefix.last().unwrap();
                let u: NodeSet = prefix[1..prefix.len() - 1].iter().copied().collect();
                let rest = all.difference(u).without(i).without(jj).without(k);
                for c in rest.subsets() {
                    let base = u.union(c);
                    if j.pair(i, jj, base) && j.pair(i, jj, base.with(k)) {
                        let mut path = prefix.clone();
                        path.push(jj);
                        return Verdict::Fails(PathWitness { path, c });
                    }
                }
            }
        }
    }
    Verdict::Holds
}

/// V-configuration `<a, l, b>` of the graph with `a` and `b` m-connected
/// given `s` in the graph while `<a, b | s>` is in the model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrientationWitness {
    pub a: usize,
    pub l: usize,
    pub b: usize,
    pub s: NodeSet,
}

impl OrientationWitness {
    pub fn render(&self, g: &Graph) -> String {
        format!("({},{},{} | {})", g.label(self.a), g.label(self.l), g.label(self.b), g.render_set(self.s))
    }
}

pub fn orientation_faithful(
    j: &IndependenceModel,
    g: &Graph,
) -> Result<Verdict<OrientationWitness>, ModelError> {
    check_universe(j, g)?;
    for (a, l, b) in g.skeleton().v_configurations() {
        for s in g.all().without(a).without(b).subsets() {
            let an_s = g.ancestors_of_set(s).union(s);
            let connected = reachable(g, a, s, an_s).contains(b);
            if connected && j.pair(a, b, s) {
                return Ok(Verdict::Fails(OrientationWitness { a, l, b, s }));
            }
        }
    }
    Ok(Verdict::Holds)
}

/// Statements avoiding `m`, over the remaining nodes in their original order.
pub fn marginalize_model(j: &IndependenceModel, m: NodeSet) -> IndependenceModel {
    let keep: Vec<usize> = j.all().difference(m).iter().collect();
    let labels = keep.iter().map(|&v| j.label(v).to_string()).collect();
    let mut out = IndependenceModel::empty_bounded(labels, HARD_MAX_NODES).expect("fewer nodes than the source");
    let remap = |s: NodeSet| -> NodeSet {
        s.iter().map(|v| keep.iter().position(|&u| u == v).unwrap()).collect()
    };
    for t in j.statements() {
        if t.support().is_disjoint(m) {
            out.set_raw(remap(t.a), remap(t.b), remap(t.c));
        }
    }
    match j.provenance() {
        Some(p) => out.with_provenance(format!("{p}, marginalized")),
        None => out,
    }
}

// SPDX-License-Identifier: MIT
//! m-separation and the independence models induced by graphs.
//!
//! [`m_separated`] enumerates paths and is the reference; [`m_separated_fast`]
//! is a reachability search over `(node, arrowhead-at-node)` states that is
//! differential-tested against it.

use std::collections::VecDeque;

use thiserror::Error;

use crate::graph::{Graph, GraphError, PartialOrder, Path};
use crate::imodel::{IndependenceModel, ModelError, Triple};
use crate::nodeset::NodeSet;
use crate::{Verdict, DEFAULT_MAX_NODES};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeparationError {
    #[error("separation sets overlap")]
    Overlap,
    #[error("node sets reference nodes outside the graph")]
    OutOfRange,
    #[error("not a path of the graph: {0}")]
    NotAPath(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// `A ⊥ B | C` as a question.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SeparationQuery {
    pub a: NodeSet,
    pub b: NodeSet,
    pub c: NodeSet,
}

impl SeparationQuery {
    pub fn new(a: NodeSet, b: NodeSet, c: NodeSet) -> Result<Self, SeparationError> {
        if !a.is_disjoint(b) || !a.is_disjoint(c) || !b.is_disjoint(c) {
            return Err(SeparationError::Overlap);
        }
        Ok(SeparationQuery { a, b, c })
    }

    pub fn pair(i: usize, j: usize, c: NodeSet) -> Result<Self, SeparationError> {
        SeparationQuery::new(NodeSet::singleton(i), NodeSet::singleton(j), c)
    }

    fn check(&self, g: &Graph) -> Result<(), SeparationError> {
        let all = g.all();
        if !self.a.union(self.b).union(self.c).is_subset(all) {
            return Err(SeparationError::OutOfRange);
        }
        Ok(())
    }
}

impl From<Triple> for SeparationQuery {
    fn from(t: Triple) -> Self {
        SeparationQuery { a: t.a, b: t.b, c: t.c }
    }
}

fn validate_path(g: &Graph, p: &Path) -> Result<(), SeparationError> {
    let nodes = p.nodes();
    if nodes.len() < 2 {
        return Err(SeparationError::NotAPath("fewer than two nodes".into()));
    }
    let mut seen = NodeSet::EMPTY;
    for &v in nodes {
        if v >= g.n() {
            return Err(SeparationError::OutOfRange);
        }
        if seen.contains(v) {
            return Err(SeparationError::NotAPath(format!("repeated node {}", g.label(v))));
        }
        seen.insert(v);
    }
    for w in nodes.windows(2) {
        if !g.adjacent(w[0], w[1]) {
            return Err(SeparationError::NotAPath(format!(
                "no edge between {} and {}",
                g.label(w[0]),
                g.label(w[1])
            )));
        }
    }
    Ok(())
}

fn connecting_given(g: &Graph, nodes: &[usize], c: NodeSet, an_c: NodeSet) -> bool {
    nodes.windows(3).all(|w| {
        let t = w[1];
        if g.is_collider(w[0], t, w[2]) {
            an_c.contains(t)
        } else {
            !c.contains(t)
        }
    })
}

/// Every collider is in `c` or an ancestor of it, and no non-collider is in `c`.
pub fn is_connecting_path(g: &Graph, p: &Path, c: NodeSet) -> Result<bool, SeparationError> {
    validate_path(g, p)?;
    if !c.is_subset(g.all()) {
        return Err(SeparationError::OutOfRange);
    }
    let an_c = g.ancestors_of_set(c).union(c);
    Ok(connecting_given(g, p.nodes(), c, an_c))
}

/// First connecting path between `q.a` and `q.b`, by depth-first enumeration
/// from the lowest source node.
pub fn connecting_path(g: &Graph, q: &SeparationQuery) -> Result<Option<Path>, SeparationError> {
    q.check(g)?;
    let an_c = g.ancestors_of_set(q.c).union(q.c);
    for a in q.a {
        let mut stack = vec![a];
        if let Some(p) = dfs(g, q, an_c, &mut stack, NodeSet::singleton(a)) {
            return Ok(Some(p));
        }
    }
    Ok(None)
}

fn dfs(g: &Graph, q: &SeparationQuery, an_c: NodeSet, stack: &mut Vec<usize>, used: NodeSet) -> Option<Path> {
    let last = *stack.last().unwrap();
    for next in g.neighbors(last).difference(used) {
        if stack.len() >= 2 {
            let prev = stack[stack.len() - 2];
            let open = if g.is_collider(prev, last, next) {
                an_c.contains(last)
            } else {
                !q.c.contains(last)
            };
            if !open {
                continue;
            }
        }
        stack.push(next);
        if q.b.contains(next) {
            let p = Path(stack.clone());
            stack.pop();
            return Some(p);
        }
        if let Some(p) = dfs(g, q, an_c, stack, used.with(next)) {
            stack.pop();
            return Some(p);
        }
        stack.pop();
    }
    None
}

/// Reference m-separation by path enumeration.
pub fn m_separated(g: &Graph, q: &SeparationQuery) -> Result<bool, SeparationError> {
    Ok(connecting_path(g, q)?.is_none())
}

/// Nodes m-connected to `a` given `c`, excluding `a` unless a walk returns to it.
pub fn reachable(g: &Graph, a: usize, c: NodeSet, an_c: NodeSet) -> NodeSet {
    // visited[v] bit 0: arrived with a tail at v; bit 1: with an arrowhead.
    let mut visited = vec![0u8; g.n()];
    let mut out = NodeSet::EMPTY;
    let mut queue = VecDeque::new();
    for w in g.neighbors(a) {
        let head = g.arrowhead_at(a, w);
        let bit = 1u8 << (head as u8);
        if visited[w] & bit == 0 {
            visited[w] |= bit;
            queue.push_back((w, head));
        }
    }
    while let Some((v, head)) = queue.pop_front() {
        out.insert(v);
        for w in g.neighbors(v) {
            let collider = head && g.arrowhead_at(w, v);
            let open = if collider { an_c.contains(v) } else { !c.contains(v) };
            if !open {
                continue;
            }
            let wh = g.arrowhead_at(v, w);
            let bit = 1u8 << (wh as u8);
            if visited[w] & bit == 0 {
                visited[w] |= bit;
                queue.push_back((w, wh));
            }
        }
    }
    out
}

/// m-separation by reachability; agrees with [`m_separated`].
pub fn m_separated_fast(g: &Graph, q: &SeparationQuery) -> Result<bool, SeparationError> {
    q.check(g)?;
    let an_c = g.ancestors_of_set(q.c).union(q.c);
    Ok(q.a.iter().all(|a| reachable(g, a, q.c, an_c).is_disjoint(q.b)))
}

/// `J(G)` with the default node bound.
pub fn induced_model(g: &Graph) -> Result<IndependenceModel, SeparationError> {
    induced_model_bounded(g, DEFAULT_MAX_NODES)
}

/// Every disjoint `<A, B | C>` with `A ⊥ B | C` in `g`.
pub fn induced_model_bounded(g: &Graph, max_nodes: usize) -> Result<IndependenceModel, SeparationError> {
    let mut model = IndependenceModel::empty_bounded(g.labels().to_vec(), max_nodes)?;
    let all = g.all();
    for c in all.subsets() {
        let an_c = g.ancestors_of_set(c).union(c);
        let rest = all.difference(c);
        let reach: Vec<NodeSet> =
            (0..g.n()).map(|v| if rest.contains(v) { reachable(g, v, c, an_c) } else { NodeSet::EMPTY }).collect();
        for a in rest.nonempty_subsets() {
            let ra = a.iter().fold(NodeSet::EMPTY, |acc, v| acc.union(reach[v]));
            let free = rest.difference(a).difference(ra);
            for b in free.nonempty_subsets() {
                model.set_raw(a, b, c);
            }
        }
    }
    Ok(model.with_provenance(format!("separation in graph over {}", g.render_set(all))))
}

/// Same model by path enumeration, for differential tests.
pub fn induced_model_reference(g: &Graph) -> Result<IndependenceModel, SeparationError> {
    let mut model = IndependenceModel::empty_bounded(g.labels().to_vec(), DEFAULT_MAX_NODES)?;
    let all = g.all();
    for c in all.subsets() {
        let rest = all.difference(c);
        for a in rest.nonempty_subsets() {
            for b in rest.difference(a).nonempty_subsets() {
                if m_separated(g, &SeparationQuery { a, b, c })? {
                    model.set_raw(a, b, c);
                }
            }
        }
    }
    Ok(model)
}

/// Every nonadjacent pair is separated by some set. Witness: the first
/// inseparable nonadjacent pair.
pub fn is_maximal(g: &Graph) -> Verdict<(usize, usize)> {
    for i in 0..g.n() {
        for j in i + 1..g.n() {
            if g.adjacent(i, j) || pair_separable(g, i, j) {
                continue;
            }
            return Verdict::Fails((i, j));
        }
    }
    Verdict::Holds
}

fn pair_separable(g: &Graph, i: usize, j: usize) -> bool {
    let sep = |c: NodeSet| {
        let an_c = g.ancestors_of_set(c).union(c);
        !reachable(g, i, c, an_c).contains(j)
    };
    if sep(g.anc_pair(i, j)) {
        return true;
    }
    g.all().without(i).without(j).subsets().any(sep)
}

/// Checks `<i, A \ (mb(i,A) ∪ {i}) | mb(i,A)>` for every node `i` and every
/// ancestral set `A ∋ i` containing no node strictly below `i`. Witness: the
/// first failing `(i, A)`.
pub fn ordered_local_markov_holds(
    j: &IndependenceModel,
    g: &Graph,
    ord: &PartialOrder,
) -> Result<Verdict<(usize, NodeSet)>, SeparationError> {
    if j.labels() != g.labels() {
        return Err(ModelError::UniverseMismatch.into());
    }
    if !g.is_valid_order(ord)?.holds() {
        return Err(GraphError::InvalidOrder("order is not valid for the graph".into()).into());
    }
    let all = g.all();
    for i in 0..g.n() {
        let allowed = all.difference(ord.below(i)).without(i);
        for extra in allowed.subsets() {
            let a = extra.with(i);
            if !g.is_ancestral_set(a) {
                continue;
            }
            let mb = g.markov_blanket_unchecked(i, a);
            let rest = a.difference(mb).without(i);
            if !j.contains(NodeSet::singleton(i), rest, mb) {
                return Ok(Verdict::Fails((i, a)));
            }
        }
    }
    Ok(Verdict::Holds)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain4() -> Graph {
        Graph::from_edges(&["i", "k", "l", "j"], &[("i", "k"), ("l", "k"), ("j", "l")], &[])
    }

    fn s(g: &Graph, l: &[&str]) -> NodeSet {
        g.set_of(l).unwrap()
    }

    fn q(g: &Graph, a: &[&str], b: &[&str], c: &[&str]) -> SeparationQuery {
        SeparationQuery::new(s(g, a), s(g, b), s(g, c)).unwrap()
    }

    #[test]
    fn connecting_paths() {
        let g = chain4();
        let p = Path(vec![0, 1, 2]);
        assert!(!is_connecting_path(&g, &p, NodeSet::EMPTY).unwrap());
        assert!(is_connecting_path(&g, &p, s(&g, &["k"])).unwrap());
        assert!(!is_connecting_path(&g, &Path(vec![1, 2, 3]), s(&g, &["l"])).unwrap());
        assert!(is_connecting_path(&g, &Path(vec![0, 2]), NodeSet::EMPTY).is_err());
    }

    #[test]
    fn chain_separations() {
        let g = chain4();
        assert!(m_separated(&g, &q(&g, &["k"], &["j"], &["l"])).unwrap());
        assert!(!m_separated(&g, &q(&g, &["i"], &["l"], &["k"])).unwrap());
        let two = Graph::new(["a", "b"]).unwrap();
        assert!(m_separated(&two, &SeparationQuery::pair(0, 1, NodeSet::EMPTY).unwrap()).unwrap());
        assert!(SeparationQuery::new(s(&g, &["i"]), s(&g, &["i"]), NodeSet::EMPTY).is_err());
    }

    #[test]
    fn witness_path_for_connection() {
        let g = chain4();
        let p = connecting_path(&g, &q(&g, &["i"], &["l"], &["k"])).unwrap().unwrap();
        assert_eq!(p.render(&g), "<i,k,l>");
    }

    #[test]
    fn chain_model() {
        let g = chain4();
        let m = induced_model(&g).unwrap();
        let t = |a: &str, b: &str, c: &[&str]| m.contains(s(&g, &[a]), s(&g, &[b]), s(&g, c));
        assert!(t("i", "j", &[]));
        assert!(t("i", "j", &["l"]));
        assert!(t("k", "j", &["l"]));
        assert!(!t("i", "l", &["k"]));
        assert_eq!(m, induced_model_reference(&g).unwrap());

        let empty = Graph::new(["a", "b"]).unwrap();
        assert!(induced_model(&empty).unwrap().contains(NodeSet::singleton(0), NodeSet::singleton(1), NodeSet::EMPTY));

        let complete = Graph::from_edges(&["a", "b", "c"], &[("a", "b"), ("a", "c"), ("b", "c")], &[]);
        assert_eq!(induced_model(&complete).unwrap().len(), 0);
    }

    #[test]
    fn maximality() {
        let g1 = Graph::from_edges(&["1", "2", "3", "4"], &[("4", "3"), ("4", "2"), ("3", "1"), ("2", "1")], &[]);
        let g2 = Graph::from_edges(&["1", "2", "3", "4"], &[("4", "3"), ("4", "2"), ("3", "1")], &[("2", "1")]);
        assert!(is_maximal(&g1).holds());
        assert!(is_maximal(&chain4()).holds());
        assert!(is_maximal(&g2).holds());

        // a <-> b <-> c <-> d is an inducing path: b ∈ an(d), c ∈ an(a).
        let nm = Graph::from_edges(
            &["a", "b", "c", "d"],
            &[("b", "d"), ("c", "a")],
            &[("a", "b"), ("b", "c"), ("c", "d")],
        );
        assert!(nm.is_ancestral().holds());
        assert_eq!(is_maximal(&nm), Verdict::Fails((0, 3)));
    }

    #[test]
    fn ordered_local_markov_examples() {
        let g = chain4();
        let ord = crate::graph::minimal_order(&g).unwrap();
        let j = induced_model(&g).unwrap();
        assert!(ordered_local_markov_holds(&j, &g, &ord).unwrap().holds());

        let mut broken = j.clone();
        broken.remove(&Triple::new(s(&g, &["k"]), s(&g, &["j"]), s(&g, &["i", "l"])).unwrap());
        assert_eq!(
            ordered_local_markov_holds(&broken, &g, &ord).unwrap(),
            Verdict::Fails((1, g.all()))
        );

        let full = IndependenceModel::full(g.labels().to_vec()).unwrap();
        assert!(ordered_local_markov_holds(&full, &g, &ord).unwrap().holds());
    }
}

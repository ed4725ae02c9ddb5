// SPDX-License-Identifier: MIT
//! Latent projection and noise augmentation.

use std::collections::BTreeMap;

use super::{Edge, Graph, GraphError, Mark};
use crate::nodeset::NodeSet;

/// Label prefix of the noise node attached to each variable by [`augment`].
pub const NOISE_PREFIX: &str = "eps_";

/// Projects out the nodes in `m`.
///
/// Every path between retained nodes whose inner nodes all lie in `m` and
/// are all non-colliders yields an edge carrying the path's end marks. The
/// result keeps the retained nodes in their original relative order. Pairs
/// that receive two different edges make the result non-simple and are
/// reported as an error.
pub fn latent_projection(g: &Graph, m: NodeSet) -> Result<Graph, GraphError> {
    if !m.is_subset(g.all()) {
        return Err(GraphError::NotSubset);
    }
    let keep = g.all().difference(m);
    // (lo, hi) -> set of (head at lo, head at hi)
    let mut found: BTreeMap<(usize, usize), Vec<(bool, bool)>> = BTreeMap::new();
    for start in keep {
        let mut stack = vec![start];
        walk(g, m, &mut stack, NodeSet::singleton(start), &mut found);
    }

    let order: Vec<usize> = keep.iter().collect();
    let pos = |v: usize| order.iter().position(|&u| u == v).unwrap();
    let mut out = Graph::new(order.iter().map(|&v| g.label(v).to_string()))?;
    for (&(a, b), marks) in &found {
        let mut marks = marks.clone();
        marks.sort();
        marks.dedup();
        if marks.len() > 1 {
            return Err(GraphError::NonSimpleProjection(g.label(a).into(), g.label(b).into()));
        }
        let (pa, pb) = (pos(a), pos(b));
        let edge = match marks[0] {
            (false, true) => Edge { from: pa, to: pb, mark: Mark::Arrow },
            (true, false) => Edge { from: pb, to: pa, mark: Mark::Arrow },
            (true, true) => Edge { from: pa, to: pb, mark: Mark::Arc },
            // A tail at both ends forces a collider on the path.
            (false, false) => unreachable!("tail-tail edge from a collider-free path"),
        };
        out.add_edge(edge)?;
    }
    Ok(out)
}

fn walk(
    g: &Graph,
    m: NodeSet,
    stack: &mut Vec<usize>,
    used: NodeSet,
    found: &mut BTreeMap<(usize, usize), Vec<(bool, bool)>>,
) {
    let last = *stack.last().unwrap();
    for next in g.neighbors(last).difference(used) {
        if stack.len() >= 2 {
            let prev = stack[stack.len() - 2];
            if g.is_collider(prev, last, next) {
                continue;
            }
        }
        if m.contains(next) {
            stack.push(next);
            walk(g, m, stack, used.with(next), found);
            stack.pop();
        } else {
            let start = stack[0];
            if start < next {
                let head_start = g.arrowhead_at(stack.get(1).copied().unwrap_or(next), start);
                let head_next = g.arrowhead_at(last, next);
                found.entry((start, next)).or_default().push((head_start, head_next));
            }
        }
    }
}

/// Adds a noise parent `eps_i -> i` for every node and moves every arc
/// `i <-> j` onto the noise pair `eps_i <-> eps_j`. Noise nodes follow the
/// original nodes in index order.
pub fn augment(g: &Graph) -> Result<Graph, GraphError> {
    let n = g.n();
    let labels = g
        .labels()
        .iter()
        .cloned()
        .chain(g.labels().iter().map(|l| format!("{NOISE_PREFIX}{l}")));
    let mut out = Graph::new(labels)?;
    for e in g.edges() {
        match e.mark {
            Mark::Arrow => out.add_arrow(e.from, e.to)?,
            Mark::Arc => out.add_arc(n + e.from, n + e.to)?,
        }
    }
    for i in 0..n {
        out.add_arrow(n + i, i)?;
    }
    Ok(out)
}

/// Indices of the noise nodes added by [`augment`] to a graph with `n` variables.
pub fn noise_nodes(n: usize) -> NodeSet {
    NodeSet::full(2 * n).difference(NodeSet::full(n))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn latent4() -> Graph {
        Graph::from_edges(&["1", "2", "3", "4"], &[("3", "1"), ("4", "2")], &[("1", "2")])
    }

    #[test]
    fn augment_moves_arcs_to_noise() {
        let aug = augment(&latent4()).unwrap();
        let expect = Graph::from_edges(
            &["1", "2", "3", "4", "eps_1", "eps_2", "eps_3", "eps_4"],
            &[
                ("3", "1"),
                ("4", "2"),
                ("eps_1", "1"),
                ("eps_2", "2"),
                ("eps_3", "3"),
                ("eps_4", "4"),
            ],
            &[("eps_1", "eps_2")],
        );
        assert_eq!(aug, expect);
        assert!(aug.is_ancestral().holds());
    }

    #[test]
    fn projection_inverts_augmentation() {
        let g = latent4();
        let aug = augment(&g).unwrap();
        assert_eq!(latent_projection(&aug, noise_nodes(4)).unwrap(), g);
    }

    #[test]
    fn single_arc_augmentation() {
        let g = Graph::from_edges(&["a", "b"], &[], &[("a", "b")]);
        let aug = augment(&g).unwrap();
        let expect = Graph::from_edges(
            &["a", "b", "eps_a", "eps_b"],
            &[("eps_a", "a"), ("eps_b", "b")],
            &[("eps_a", "eps_b")],
        );
        assert_eq!(aug, expect);
    }

    #[test]
    fn projection_basics() {
        let g = latent4();
        assert_eq!(latent_projection(&g, NodeSet::EMPTY).unwrap(), g);

        let chain = Graph::from_edges(&["a", "h", "b"], &[("a", "h"), ("h", "b")], &[]);
        let p = latent_projection(&chain, NodeSet::singleton(1)).unwrap();
        assert_eq!(p, Graph::from_edges(&["a", "b"], &[("a", "b")], &[]));

        let fork = Graph::from_edges(&["a", "h", "b"], &[("h", "a"), ("h", "b")], &[]);
        let p = latent_projection(&fork, NodeSet::singleton(1)).unwrap();
        assert_eq!(p, Graph::from_edges(&["a", "b"], &[], &[("a", "b")]));

        let collider = Graph::from_edges(&["a", "h", "b"], &[("a", "h"), ("b", "h")], &[]);
        let p = latent_projection(&collider, NodeSet::singleton(1)).unwrap();
        assert!(p.edges().is_empty());

        assert!(matches!(latent_projection(&g, NodeSet::singleton(7)), Err(GraphError::NotSubset)));
    }

    #[test]
    fn conflicting_marks_rejected() {
        // a -> b directly and a <- h -> b through the latent h.
        let g = Graph::from_edges(&["a", "b", "h"], &[("a", "b"), ("h", "a"), ("h", "b")], &[]);
        assert!(matches!(
            latent_projection(&g, NodeSet::singleton(2)),
            Err(GraphError::NonSimpleProjection(..))
        ));
    }
}

// SPDX-License-Identifier: MIT
//! Collider V-configurations and minimal collider paths.

use std::collections::BTreeMap;

use super::{Graph, Path};
use crate::nodeset::NodeSet;

/// Tripath `<a, mid, b>` with `a < b` nonadjacent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VConfiguration {
    pub a: usize,
    pub mid: usize,
    pub b: usize,
}

impl VConfiguration {
    pub fn render(&self, g: &Graph) -> String {
        format!("<{},{},{}>", g.label(self.a), g.label(self.mid), g.label(self.b))
    }
}

/// All V-configurations of `g` whose middle node is a collider.
pub fn collider_v_configurations(g: &Graph) -> Vec<VConfiguration> {
    g.skeleton()
        .v_configurations()
        .into_iter()
        .filter(|&(a, t, b)| g.is_collider(a, t, b))
        .map(|(a, mid, b)| VConfiguration { a, mid, b })
        .collect()
}

/// Every collider path with nonadjacent endpoints, each listed once with
/// the smaller endpoint first.
fn collider_paths(g: &Graph) -> Vec<Path> {
    let mut out = Vec::new();
    for start in 0..g.n() {
        // First hop needs an arrowhead at the first inner node.
        for q in g.neighbors(start) {
            if !g.arrowhead_at(start, q) {
                continue;
            }
            let mut stack = vec![start, q];
            extend(g, &mut stack, NodeSet::singleton(start).with(q), &mut out);
        }
    }
    out
}

fn extend(g: &Graph, stack: &mut Vec<usize>, used: NodeSet, out: &mut Vec<Path>) {
    let last = *stack.last().unwrap();
    let prev = stack[stack.len() - 2];
    let start = stack[0];
    for next in g.neighbors(last).difference(used) {
        // `last` becomes an inner node, so it must be a collider.
        if !g.is_collider(prev, last, next) {
            continue;
        }
        stack.push(next);
        if next > start && !g.adjacent(start, next) {
            out.push(Path(stack.clone()));
        }
        // Continuing past `next` needs an arc into it from `last`.
        if g.spouses(last).contains(next) {
            extend(g, stack, used.with(next), out);
        }
        stack.pop();
    }
}

/// Collider paths between nonadjacent endpoints whose inner node set has no
/// proper subset supporting another collider path between the same
/// endpoints. Sorted by length, then by node sequence.
pub fn minimal_collider_paths(g: &Graph) -> Vec<Path> {
    let mut by_ends: BTreeMap<(usize, usize), Vec<(NodeSet, Path)>> = BTreeMap::new();
    for p in collider_paths(g) {
        let inner: NodeSet = p.inner().iter().copied().collect();
        by_ends.entry(p.endpoints()).or_default().push((inner, p));
    }
    let mut out = Vec::new();
    for paths in by_ends.values() {
        for (inner, p) in paths {
            let dominated = paths.iter().any(|(other, _)| other.is_subset(*inner) && other != inner);
            if !dominated {
                out.push(p.clone());
            }
        }
    }
    out.sort_by(|a, b| a.0.len().cmp(&b.0.len()).then_with(|| a.0.cmp(&b.0)));
    out
}

// SPDX-License-Identifier: MIT
//! Directed ancestral graphs: simple mixed graphs with arrows (`a -> b`) and
//! arcs (`a <-> b`).
//!
//! Adjacency is stored as one parent, child and spouse bitset per node, so two
//! graphs over the same labels compare equal exactly when they have the same
//! edges with the same marks.

mod colliders;
mod format;
mod order;
mod projection;

use std::fmt;

use thiserror::Error;

use crate::nodeset::{NodeSet, MAX_NODES};
use crate::Verdict;

pub use colliders::{collider_v_configurations, minimal_collider_paths, VConfiguration};
pub use format::{parse_graph, ParseError};
pub use order::{minimal_order, PartialOrder};
pub use projection::{augment, latent_projection, noise_nodes, NOISE_PREFIX};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("node index {0} out of range")]
    NodeOutOfRange(usize),
    #[error("duplicate node label `{0}`")]
    DuplicateLabel(String),
    #[error("graph has {0} nodes; at most {MAX_NODES} are supported")]
    TooManyNodes(usize),
    #[error("self-loop at `{0}`")]
    SelfLoop(String),
    #[error("duplicate edge between `{0}` and `{1}`")]
    DuplicateEdge(String, String),
    #[error("no edge between `{0}` and `{1}`")]
    MissingEdge(String, String),
    #[error("graph is not ancestral: {0}")]
    NotAncestral(String),
    #[error("node set is not ancestral")]
    NotAncestralSet,
    #[error("node `{0}` has children inside the set")]
    HasChildrenInSet(String),
    #[error("node set is not a subset of the graph's nodes")]
    NotSubset,
    #[error("order and graph are over different node sets")]
    DomainMismatch,
    #[error("invalid partial order: {0}")]
    InvalidOrder(String),
    #[error(
        "latent projection leaves the simple-graph regime: conflicting edges between `{0}` and `{1}`"
    )]
    NonSimpleProjection(String, String),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mark {
    Arrow,
    Arc,
}

/// An edge as stored: arrows go `from -> to`; arcs have `from < to`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub mark: Mark,
}

/// Why a graph fails to be ancestral.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NonAncestral {
    /// Nodes of a directed cycle in order; the last points back to the first.
    DirectedCycle(Vec<usize>),
    /// Arc `a <-> b` with `ancestor` an ancestor of the other endpoint.
    ArcWithAncestor { a: usize, b: usize, ancestor: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TripathKind {
    Collider,
    NonCollider,
}

/// A path given by its node sequence; the graph is simple so the edges are
/// implied.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Path(pub Vec<usize>);

impl Path {
    pub fn nodes(&self) -> &[usize] {
        &self.0
    }

    pub fn endpoints(&self) -> (usize, usize) {
        (self.0[0], *self.0.last().unwrap())
    }

    pub fn inner(&self) -> &[usize] {
        let n = self.0.len();
        if n <= 2 {
            &[]
        } else {
            &self.0[1..n - 1]
        }
    }

    pub fn reversed(&self) -> Path {
        Path(self.0.iter().rev().copied().collect())
    }

    /// Orientation with the smaller endpoint first.
    pub fn canonical(&self) -> Path {
        let (a, b) = self.endpoints();
        if a <= b {
            self.clone()
        } else {
            self.reversed()
        }
    }

    pub fn render(&self, g: &Graph) -> String {
        let parts: Vec<&str> = self.0.iter().map(|&v| g.label(v)).collect();
        format!("<{}>", parts.join(","))
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    labels: Vec<String>,
    parents: Vec<NodeSet>,
    children: Vec<NodeSet>,
    spouses: Vec<NodeSet>,
}

impl Graph {
    pub fn new<S: Into<String>, I: IntoIterator<Item = S>>(labels: I) -> Result<Self, GraphError> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.len() > MAX_NODES {
            return Err(GraphError::TooManyNodes(labels.len()));
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(GraphError::DuplicateLabel(l.clone()));
            }
        }
        let n = labels.len();
        Ok(Graph {
            labels,
            parents: vec![NodeSet::EMPTY; n],
            children: vec![NodeSet::EMPTY; n],
            spouses: vec![NodeSet::EMPTY; n],
        })
    }

    /// Graph with labels `"0", "1", ...`.
    pub fn with_nodes(n: usize) -> Result<Self, GraphError> {
        Graph::new((0..n).map(|i| i.to_string()))
    }

    /// Builds a graph from label pairs; panics on malformed input. Meant for
    /// fixtures and tests.
    pub fn from_edges(labels: &[&str], arrows: &[(&str, &str)], arcs: &[(&str, &str)]) -> Self {
        let mut g = Graph::new(labels.iter().copied()).expect("labels");
        for &(a, b) in arrows {
            let (a, b) = (g.node(a).unwrap(), g.node(b).unwrap());
            g.add_arrow(a, b).expect("arrow");
        }
        for &(a, b) in arcs {
            let (a, b) = (g.node(a).unwrap(), g.node(b).unwrap());
            g.add_arc(a, b).expect("arc");
        }
        g
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

    pub fn node(&self, label: &str) -> Result<usize, GraphError> {
        self.index_of(label).ok_or_else(|| GraphError::UnknownNode(label.to_string()))
    }

    pub fn set_of(&self, labels: &[&str]) -> Result<NodeSet, GraphError> {
        labels.iter().map(|l| self.node(l)).collect()
    }

    pub fn render_set(&self, s: NodeSet) -> String {
        let parts: Vec<&str> = s.iter().map(|v| self.label(v)).collect();
        format!("{{{}}}", parts.join(","))
    }

    fn check(&self, i: usize) -> Result<(), GraphError> {
        if i < self.n() {
            Ok(())
        } else {
            Err(GraphError::NodeOutOfRange(i))
        }
    }

    fn check_new_edge(&self, a: usize, b: usize) -> Result<(), GraphError> {
        self.check(a)?;
        self.check(b)?;
        if a == b {
            return Err(GraphError::SelfLoop(self.labels[a].clone()));
        }
        if self.adjacent(a, b) {
            return Err(GraphError::DuplicateEdge(self.labels[a].clone(), self.labels[b].clone()));
        }
        Ok(())
    }

    pub fn add_arrow(&mut self, from: usize, to: usize) -> Result<(), GraphError> {
        self.check_new_edge(from, to)?;
        self.children[from].insert(to);
        self.parents[to].insert(from);
        Ok(())
    }

    pub fn add_arc(&mut self, a: usize, b: usize) -> Result<(), GraphError> {
        self.check_new_edge(a, b)?;
        self.spouses[a].insert(b);
        self.spouses[b].insert(a);
        Ok(())
    }

    pub fn add_edge(&mut self, e: Edge) -> Result<(), GraphError> {
        match e.mark {
            Mark::Arrow => self.add_arrow(e.from, e.to),
            Mark::Arc => self.add_arc(e.from, e.to),
        }
    }

    pub fn parents(&self, v: usize) -> NodeSet {
        self.parents[v]
    }

    pub fn children(&self, v: usize) -> NodeSet {
        self.children[v]
    }

    pub fn spouses(&self, v: usize) -> NodeSet {
        self.spouses[v]
    }

    pub fn neighbors(&self, v: usize) -> NodeSet {
        self.parents[v].union(self.children[v]).union(self.spouses[v])
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.neighbors(a).contains(b)
    }

    pub fn edge_between(&self, a: usize, b: usize) -> Option<Edge> {
        if self.children[a].contains(b) {
            Some(Edge { from: a, to: b, mark: Mark::Arrow })
        } else if self.children[b].contains(a) {
            Some(Edge { from: b, to: a, mark: Mark::Arrow })
        } else if self.spouses[a].contains(b) {
            Some(Edge { from: a.min(b), to: a.max(b), mark: Mark::Arc })
        } else {
            None
        }
    }

    /// Whether the edge between `other` and `at` carries an arrowhead at
    /// `at`. The two nodes must be adjacent.
    pub fn arrowhead_at(&self, other: usize, at: usize) -> bool {
        self.parents[at].contains(other) || self.spouses[at].contains(other)
    }

    /// Canonically ordered edge list.
    pub fn edges(&self) -> Vec<Edge> {
        let mut out = Vec::new();
        for a in 0..self.n() {
            for b in self.children[a] {
                out.push(Edge { from: a, to: b, mark: Mark::Arrow });
            }
            for b in self.spouses[a] {
                if a < b {
                    out.push(Edge { from: a, to: b, mark: Mark::Arc });
                }
            }
        }
        out.sort();
        out
    }

    pub fn edge_count(&self) -> usize {
        self.skeleton().edges().len()
    }

    pub fn has_arcs(&self) -> bool {
        self.spouses.iter().any(|s| !s.is_empty())
    }

    /// No arcs and no directed cycle.
    pub fn is_dag(&self) -> bool {
        !self.has_arcs() && self.directed_cycle().is_none()
    }

    /// Ancestors of `i`, excluding `i` itself unless it lies on a directed
    /// cycle.
    pub fn ancestors(&self, i: usize) -> NodeSet {
        let mut seen = NodeSet::EMPTY;
        let mut stack: Vec<usize> = self.parents[i].iter().collect();
        while let Some(v) = stack.pop() {
            if seen.contains(v) {
                continue;
            }
            seen.insert(v);
            stack.extend(self.parents[v].difference(seen));
        }
        seen
    }

    pub fn try_ancestors(&self, i: usize) -> Result<NodeSet, GraphError> {
        self.check(i)?;
        Ok(self.ancestors(i))
    }

    /// `an(S)`: nodes with a directed path into some member of `s`.
    pub fn ancestors_of_set(&self, s: NodeSet) -> NodeSet {
        s.iter().fold(NodeSet::EMPTY, |acc, v| acc.union(self.ancestors(v)))
    }

    pub fn ancestor_table(&self) -> Vec<NodeSet> {
        (0..self.n()).map(|i| self.ancestors(i)).collect()
    }

    pub fn descendants(&self, i: usize) -> NodeSet {
        let mut seen = NodeSet::EMPTY;
        let mut stack: Vec<usize> = self.children[i].iter().collect();
        while let Some(v) = stack.pop() {
            if seen.contains(v) {
                continue;
            }
            seen.insert(v);
            stack.extend(self.children[v].difference(seen));
        }
        seen
    }

    /// `an(i, j) = (an(i) ∪ an(j)) \ {i, j}`.
    pub fn anc_pair(&self, i: usize, j: usize) -> NodeSet {
        self.ancestors(i).union(self.ancestors(j)).without(i).without(j)
    }

    pub fn try_anc_pair(&self, i: usize, j: usize) -> Result<NodeSet, GraphError> {
        self.check(i)?;
        self.check(j)?;
        Ok(self.anc_pair(i, j))
    }

    fn directed_cycle(&self) -> Option<Vec<usize>> {
        // Iterative DFS with colours; the grey stack is the current path.
        let n = self.n();
        let mut colour = vec![0u8; n];
        for root in 0..n {
            if colour[root] != 0 {
                continue;
            }
            let mut stack: Vec<(usize, Vec<usize>)> = vec![(root, self.children[root].iter().collect())];
            colour[root] = 1;
            while let Some((v, pending)) = stack.last_mut() {
                let v = *v;
                if let Some(w) = pending.pop() {
                    match colour[w] {
                        0 => {
                            colour[w] = 1;
                            stack.push((w, self.children[w].iter().collect()));
                        }
                        1 => {
                            let pos = stack.iter().position(|(u, _)| *u == w).unwrap();
                            return Some(stack[pos..].iter().map(|(u, _)| *u).collect());
                        }
                        _ => {}
                    }
                } else {
                    colour[v] = 2;
                    stack.pop();
                }
            }
        }
        None
    }

    /// No directed cycle and no arc between a node and one of its ancestors.
    pub fn is_ancestral(&self) -> Verdict<NonAncestral> {
        if let Some(cycle) = self.directed_cycle() {
            return Verdict::Fails(NonAncestral::DirectedCycle(cycle));
        }
        for a in 0..self.n() {
            let an_a = self.ancestors(a);
            for b in self.spouses[a] {
                if a < b {
                    if an_a.contains(b) {
                        return Verdict::Fails(NonAncestral::ArcWithAncestor { a, b, ancestor: b });
                    }
                    if self.ancestors(b).contains(a) {
                        return Verdict::Fails(NonAncestral::ArcWithAncestor { a, b, ancestor: a });
                    }
                }
            }
        }
        Verdict::Holds
    }

    pub fn require_ancestral(&self) -> Result<(), GraphError> {
        match self.is_ancestral() {
            Verdict::Holds => Ok(()),
            Verdict::Fails(w) => Err(GraphError::NotAncestral(self.render_non_ancestral(&w))),
        }
    }

    pub fn render_non_ancestral(&self, w: &NonAncestral) -> String {
        match w {
            NonAncestral::DirectedCycle(c) => {
                let parts: Vec<&str> = c.iter().map(|&v| self.label(v)).collect();
                format!("directed cycle {}", parts.join(" -> "))
            }
            NonAncestral::ArcWithAncestor { a, b, ancestor } => format!(
                "arc {} <-> {} with {} an ancestor of the other endpoint",
                self.label(*a),
                self.label(*b),
                self.label(*ancestor)
            ),
        }
    }

    /// Classifies the inner node `t` of the tripath `<a, t, b>`.
    pub fn classify_tripath(&self, a: usize, t: usize, b: usize) -> Result<TripathKind, GraphError> {
        for x in [a, t, b] {
            self.check(x)?;
        }
        for x in [a, b] {
            if !self.adjacent(x, t) {
                return Err(GraphError::MissingEdge(self.labels[x].clone(), self.labels[t].clone()));
            }
        }
        Ok(if self.arrowhead_at(a, t) && self.arrowhead_at(b, t) {
            TripathKind::Collider
        } else {
            TripathKind::NonCollider
        })
    }

    /// Collider test without error handling, for the hot loops.
    pub(crate) fn is_collider(&self, a: usize, t: usize, b: usize) -> bool {
        self.arrowhead_at(a, t) && self.arrowhead_at(b, t)
    }

    pub fn skeleton(&self) -> Skeleton {
        Skeleton {
            labels: self.labels.clone(),
            adj: (0..self.n()).map(|v| self.neighbors(v)).collect(),
        }
    }

    /// Nodes joined to `i` by an all-arc path, together with `i`.
    pub fn district(&self, i: usize) -> NodeSet {
        self.district_within(i, self.all())
    }

    pub fn try_district(&self, i: usize) -> Result<NodeSet, GraphError> {
        self.check(i)?;
        Ok(self.district(i))
    }

    /// District of `i` in the induced subgraph on `within`.
    pub fn district_within(&self, i: usize, within: NodeSet) -> NodeSet {
        let mut seen = NodeSet::singleton(i);
        let mut stack = vec![i];
        while let Some(v) = stack.pop() {
            for w in self.spouses[v].intersection(within).difference(seen) {
                seen.insert(w);
                stack.push(w);
            }
        }
        seen
    }

    /// Districts of the whole graph, each listed once, ordered by smallest member.
    pub fn districts(&self) -> Vec<NodeSet> {
        let mut covered = NodeSet::EMPTY;
        let mut out = Vec::new();
        for v in 0..self.n() {
            if !covered.contains(v) {
                let d = self.district(v);
                covered = covered.union(d);
                out.push(d);
            }
        }
        out
    }

    pub fn is_ancestral_set(&self, a: NodeSet) -> bool {
        self.ancestors_of_set(a).is_subset(a)
    }

    /// `mb(i, A) = pa(dis(i)) ∪ (dis(i) \ {i})`, both taken in `G[A]`.
    pub fn markov_blanket(&self, i: usize, a: NodeSet) -> Result<NodeSet, GraphError> {
        self.check(i)?;
        if !a.is_subset(self.all()) {
            return Err(GraphError::NotSubset);
        }
        if !a.contains(i) || !self.is_ancestral_set(a) {
            return Err(GraphError::NotAncestralSet);
        }
        if !self.children[i].is_disjoint(a) {
            return Err(GraphError::HasChildrenInSet(self.labels[i].clone()));
        }
        Ok(self.markov_blanket_unchecked(i, a))
    }

    pub(crate) fn markov_blanket_unchecked(&self, i: usize, a: NodeSet) -> NodeSet {
        let dis = self.district_within(i, a);
        let pa = dis
            .iter()
            .fold(NodeSet::EMPTY, |acc, v| acc.union(self.parents[v].intersection(a)));
        pa.union(dis).without(i)
    }

    /// Subgraph induced by `keep`, reindexed in increasing index order.
    pub fn induced_subgraph(&self, keep: NodeSet) -> Graph {
        let order: Vec<usize> = keep.iter().filter(|&v| v < self.n()).collect();
        let mut g = Graph::new(order.iter().map(|&v| self.labels[v].clone())).unwrap();
        let pos = |v: usize| order.iter().position(|&u| u == v);
        for e in self.edges() {
            if let (Some(a), Some(b)) = (pos(e.from), pos(e.to)) {
                g.add_edge(Edge { from: a, to: b, mark: e.mark }).unwrap();
            }
        }
        g
    }

    /// Same node set and labels.
    pub fn same_nodes(&self, other: &Graph) -> bool {
        self.labels == other.labels
    }

    pub fn to_text(&self) -> String {
        format::write_graph(self)
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let edges = self.edges();
        if edges.is_empty() {
            return write!(f, "Graph {{}}");
        }
        write!(f, "Graph {{ ")?;
        for (k, e) in edges.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            let op = match e.mark {
                Mark::Arrow => "->",
                Mark::Arc => "<->",
            };
            write!(f, "{} {} {}", self.label(e.from), op, self.label(e.to))?;
        }
        write!(f, " }}")
    }
}

impl fmt::Display for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Undirected view of a graph or of an independence model.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Skeleton {
    labels: Vec<String>,
    adj: Vec<NodeSet>,
}

impl Skeleton {
    pub fn empty(labels: Vec<String>) -> Self {
        let n = labels.len();
        Skeleton { labels, adj: vec![NodeSet::EMPTY; n] }
    }

    pub fn add_edge(&mut self, a: usize, b: usize) {
        self.adj[a].insert(b);
        self.adj[b].insert(a);
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.adj[a].contains(b)
    }

    pub fn neighbors(&self, v: usize) -> NodeSet {
        self.adj[v]
    }

    /// Edges as `(a, b)` with `a < b`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for a in 0..self.n() {
            for b in self.adj[a] {
                if a < b {
                    out.push((a, b));
                }
            }
        }
        out
    }

    /// Tripaths `<i, k, j>` with `i < j` non-adjacent.
    pub fn v_configurations(&self) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for k in 0..self.n() {
            let nb: Vec<usize> = self.adj[k].iter().collect();
            for (x, &i) in nb.iter().enumerate() {
                for &j in &nb[x + 1..] {
                    if !self.adjacent(i, j) {
                        out.push((i, k, j));
                    }
                }
            }
        }
        out.sort_by_key(|&(i, k, j)| (i, j, k));
        out
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("nodes: {}\n", self.labels.join(" "));
        for (a, b) in self.edges() {
            s.push_str(&format!("{} -- {}\n", self.labels[a], self.labels[b]));
        }
        s
    }
}

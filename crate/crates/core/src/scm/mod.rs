// SPDX-License-Identifier: MIT
//! Finite discrete structural causal models with exact rational arithmetic.
//!
//! Each node `i` has a finite value set, a noise `ε_i` and a mechanism
//! `X_i = φ_i(X_pa(i), ε_i)` given as a total lookup table. Noises are
//! grouped into blocks, one per district; blocks are independent of each
//! other and, inside a block, two groups of noises must be dependent exactly
//! when an arc joins them. The joint distribution is the push-forward of the
//! noise measure, computed by enumeration.

mod builtin;
mod checks;
mod dist;
mod format;

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::graph::{Graph, GraphError};
use crate::imodel::{IndependenceModel, ModelError};
use crate::nodeset::NodeSet;
use crate::separation::SeparationQuery;
use crate::DEFAULT_MAX_NODES;

pub use builtin::{builtin, BUILTIN_IDS};
pub use checks::{
    check_non_constant_fibers, check_noise_injective, check_noise_surjective, check_noise_uniform,
    check_positivity, scm_audit, FiberWitness, InjectivityWitness, PositivityWitness, SurjectivityWitness,
};
pub use dist::Dist;
pub use format::{parse_scm, write_scm};

pub type Value = i64;
pub type Prob = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScmError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("node `{0}` has an empty or repeated value set")]
    BadSupport(String),
    #[error("noise blocks must be the districts of the graph: {0}")]
    BadBlocks(String),
    #[error("bad probability `{0}`")]
    BadProbability(String),
    #[error("noise block {0} does not sum to 1")]
    NotNormalized(usize),
    #[error("noise block {block}: row has {got} values for {want} nodes")]
    RowArity { block: usize, got: usize, want: usize },
    #[error("noises of {a} and {b} must be {}", if *.dependent { "dependent" } else { "independent" })]
    NoiseDependence { a: String, b: String, dependent: bool },
    #[error("mechanism of `{node}` has no row for parents {parents:?} and noise {noise}")]
    NotTotal { node: String, parents: Vec<Value>, noise: Value },
    #[error("mechanism of `{node}` outputs {value}, outside its value set")]
    OutOfSupport { node: String, value: Value },
    #[error("mechanism of `{node}` is not injective in its noise")]
    NotInjective { node: String },
    #[error("query sets overlap or leave the graph")]
    BadQuery,
    #[error("unknown built-in model `{0}`")]
    UnknownBuiltin(String),
    #[error("SCM format: {0}")]
    Format(String),
}

/// Joint noise table of one district.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NoiseBlock {
    /// Members in increasing index order.
    pub nodes: Vec<usize>,
    /// Rows of noise values, aligned with `nodes`, and their probabilities.
    pub table: Vec<(Vec<Value>, Prob)>,
}

/// `φ_i` as a table from (parent values in increasing parent order, noise) to output.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Mechanism {
    pub table: BTreeMap<(Vec<Value>, Value), Value>,
}

#[derive(Debug, Clone)]
pub struct Scm {
    graph: Graph,
    supports: Vec<Vec<Value>>,
    blocks: Vec<NoiseBlock>,
    mechanisms: Vec<Mechanism>,
    noise_marginals: Vec<Dist>,
    topo: Vec<usize>,
}

/// All tuples of the product of `sets`, first coordinate slowest.
pub(crate) fn product(sets: &[&[Value]]) -> Vec<Vec<Value>> {
    let mut out = vec![Vec::new()];
    for s in sets {
        let mut next = Vec::with_capacity(out.len() * s.len());
        for prefix in &out {
            for &v in s.iter() {
                let mut t = prefix.clone();
                t.push(v);
                next.push(t);
            }
        }
        out = next;
    }
    out
}

fn topological(g: &Graph) -> Vec<usize> {
    let mut done = NodeSet::EMPTY;
    let mut order = Vec::with_capacity(g.n());
    while order.len() < g.n() {
        let v = (0..g.n())
            .find(|&v| !done.contains(v) && g.parents(v).is_subset(done))
            .expect("ancestral graphs are acyclic");
        done.insert(v);
        order.push(v);
    }
    order
}

impl Scm {
    pub fn new(
        graph: Graph,
        supports: Vec<Vec<Value>>,
        blocks: Vec<NoiseBlock>,
        mechanisms: Vec<Mechanism>,
    ) -> Result<Self, ScmError> {
        graph.require_ancestral()?;
        let n = graph.n();
        if supports.len() != n || mechanisms.len() != n {
            return Err(ScmError::Format("one value set and one mechanism per node".into()));
        }
        for (v, s) in supports.iter().enumerate() {
            let mut sorted = s.clone();
            sorted.sort();
            sorted.dedup();
            if s.is_empty() || sorted.len() != s.len() {
                return Err(ScmError::BadSupport(graph.label(v).to_string()));
            }
        }
        let mut districts = graph.districts();
        districts.sort_by_key(|d| d.first());
        let mut given: Vec<NodeSet> = blocks.iter().map(|b| b.nodes.iter().copied().collect()).collect();
        given.sort_by_key(|d| d.first());
        if given != districts || blocks.iter().any(|b| !b.nodes.windows(2).all(|w| w[0] < w[1])) {
            return Err(ScmError::BadBlocks(
                districts.iter().map(|d| graph.render_set(*d)).collect::<Vec<_>>().join(" "),
            ));
        }
        let mut noise_marginals = vec![Dist::new(); n];
        for (bi, b) in blocks.iter().enumerate() {
            let mut total = Prob::zero();
            let mut d = Dist::new();
            for (vals, p) in &b.table {
                if vals.len() != b.nodes.len() {
                    return Err(ScmError::RowArity { block: bi, got: vals.len(), want: b.nodes.len() });
                }
                if *p < Prob::zero() {
                    return Err(ScmError::BadProbability(p.to_string()));
                }
                total += p;
                d.add(vals.clone(), p.clone());
            }
            if total != Prob::one() {
                return Err(ScmError::NotNormalized(bi));
            }
            check_block_dependence(&graph, &b.nodes, &d)?;
            for (pos, &v) in b.nodes.iter().enumerate() {
                noise_marginals[v] = d.project(&[pos]);
            }
        }
        let scm = Scm { topo: topological(&graph), graph, supports, blocks, mechanisms, noise_marginals };
        scm.check_mechanisms()?;
        Ok(scm)
    }

    /// Fills every mechanism table from `f(node, parent values, noise)`.
    pub fn from_fn(
        graph: Graph,
        supports: Vec<Vec<Value>>,
        blocks: Vec<NoiseBlock>,
        f: impl Fn(usize, &[Value], Value) -> Value,
    ) -> Result<Self, ScmError> {
        let mut noise_support = vec![Vec::new(); graph.n()];
        for b in &blocks {
            for (pos, &v) in b.nodes.iter().enumerate() {
                let mut vals: Vec<Value> = b.table.iter().filter(|r| r.1 > Prob::zero()).map(|r| r.0[pos]).collect();
                vals.sort();
                vals.dedup();
                noise_support[v] = vals;
            }
        }
        let mut mechanisms = Vec::with_capacity(graph.n());
        for (v, noise) in noise_support.iter().enumerate() {
            let pa: Vec<&[Value]> = graph.parents(v).iter().map(|p| supports[p].as_slice()).collect();
            let mut m = Mechanism::default();
            for xs in product(&pa) {
                for &e in noise {
                    m.table.insert((xs.clone(), e), f(v, &xs, e));
                }
            }
            mechanisms.push(m);
        }
        Scm::new(graph, supports, blocks, mechanisms)
    }

    fn check_mechanisms(&self) -> Result<(), ScmError> {
        for v in 0..self.n() {
            let label = self.graph.label(v).to_string();
            for xs in self.parent_tuples(v) {
                for e in self.noise_support(v) {
                    match self.mechanisms[v].table.get(&(xs.clone(), e)) {
                        None => return Err(ScmError::NotTotal { node: label, parents: xs, noise: e }),
                        Some(out) if !self.supports[v].contains(out) => {
                            return Err(ScmError::OutOfSupport { node: label, value: *out })
                        }
                        _ => {}
                    }
                }
            }
        }
        Ok(())
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn support(&self, v: usize) -> &[Value] {
        &self.supports[v]
    }

    pub fn supports(&self) -> &[Vec<Value>] {
        &self.supports
    }

    pub fn blocks(&self) -> &[NoiseBlock] {
        &self.blocks
    }

    pub fn mechanism(&self, v: usize) -> &Mechanism {
        &self.mechanisms[v]
    }

    /// Noise values of `v` with positive probability, increasing.
    pub fn noise_support(&self, v: usize) -> Vec<Value> {
        self.noise_marginals[v].iter().map(|(k, _)| k[0]).collect()
    }

    pub fn noise_marginal(&self, v: usize) -> &Dist {
        &self.noise_marginals[v]
    }

    /// Every tuple of parent values, parents in increasing order.
    pub fn parent_tuples(&self, v: usize) -> Vec<Vec<Value>> {
        let pa: Vec<&[Value]> = self.graph.parents(v).iter().map(|p| self.supports[p].as_slice()).collect();
        product(&pa)
    }

    pub fn apply(&self, v: usize, parents: &[Value], noise: Value) -> Value {
        self.mechanisms[v].table[&(parents.to_vec(), noise)]
    }

    pub fn joint_distribution(&self) -> JointTable {
        let mut dist = Dist::new();
        let mut noise = vec![0; self.n()];
        self.push_blocks(0, Prob::one(), &mut noise, &mut dist);
        JointTable { labels: self.graph.labels().to_vec(), dist }
    }

    fn push_blocks(&self, bi: usize, p: Prob, noise: &mut Vec<Value>, out: &mut Dist) {
        if bi == self.blocks.len() {
            let mut x = vec![0; self.n()];
            for &v in &self.topo {
                let pa: Vec<Value> = self.graph.parents(v).iter().map(|u| x[u]).collect();
                x[v] = self.apply(v, &pa, noise[v]);
            }
            out.add(x, p);
            return;
        }
        for (vals, q) in &self.blocks[bi].table {
            if q.is_zero() {
                continue;
            }
            for (pos, &v) in self.blocks[bi].nodes.iter().enumerate() {
                noise[v] = vals[pos];
            }
            self.push_blocks(bi + 1, &p * q, noise, out);
        }
    }

    pub fn ci_query(&self, q: &SeparationQuery) -> Result<bool, ScmError> {
        self.joint_distribution().independent(q.a, q.b, q.c)
    }

    pub fn induced_model(&self) -> Result<IndependenceModel, ScmError> {
        self.induced_model_bounded(DEFAULT_MAX_NODES)
    }

    pub fn induced_model_bounded(&self, max_nodes: usize) -> Result<IndependenceModel, ScmError> {
        let mut m = IndependenceModel::empty_bounded(self.graph.labels().to_vec(), max_nodes)?;
        let joint = self.joint_distribution();
        let all = self.graph.all();
        for c in all.subsets() {
            let rest = all.difference(c);
            for a in rest.nonempty_subsets() {
                for b in rest.difference(a).nonempty_subsets() {
                    if a.bits() < b.bits() && joint.independent(a, b, c)? {
                        m.set_raw(a, b, c);
                    }
                }
            }
        }
        Ok(m.with_provenance(format!("conditional independence of an SCM over {}", self.graph.render_set(all))))
    }
}

/// Within a block, noise groups are dependent iff an arc joins them.
fn check_block_dependence(g: &Graph, nodes: &[usize], d: &Dist) -> Result<(), ScmError> {
    let k = nodes.len();
    let members = NodeSet::full(k);
    for a in members.nonempty_subsets() {
        for b in members.difference(a).nonempty_subsets() {
            if a.bits() > b.bits() {
                continue;
            }
            let arc = a.iter().any(|x| b.iter().any(|y| g.spouses(nodes[x]).contains(nodes[y])));
            let cols = |s: NodeSet| s.iter().collect::<Vec<_>>();
            let indep = d.independent(&cols(a), &cols(b), &[]);
            if indep == arc {
                let name = |s: NodeSet| g.render_set(s.iter().map(|x| nodes[x]).collect());
                return Err(ScmError::NoiseDependence { a: name(a), b: name(b), dependent: arc });
            }
        }
    }
    Ok(())
}

/// Exact joint distribution of the endogenous variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JointTable {
    pub labels: Vec<String>,
    pub dist: Dist,
}

impl JointTable {
    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn marginal(&self, s: NodeSet) -> Dist {
        self.dist.project(&s.iter().collect::<Vec<_>>())
    }

    /// `X_a ⊥ X_b | X_c`, decided by exact equality of rationals.
    pub fn independent(&self, a: NodeSet, b: NodeSet, c: NodeSet) -> Result<bool, ScmError> {
        let all = NodeSet::full(self.n());
        let ok = a.is_disjoint(b) && a.is_disjoint(c) && b.is_disjoint(c) && a.union(b).union(c).is_subset(all);
        if !ok {
            return Err(ScmError::BadQuery);
        }
        if a.is_empty() || b.is_empty() {
            return Ok(true);
        }
        let cols = |s: NodeSet| s.iter().collect::<Vec<_>>();
        Ok(self.dist.independent(&cols(a), &cols(b), &cols(c)))
    }

    pub fn render(&self) -> String {
        let mut s = format!("{}  p\n", self.labels.join(" "));
        for (k, p) in self.dist.iter() {
            let vals: Vec<String> = k.iter().map(|v| v.to_string()).collect();
            s.push_str(&format!("{}  {p}\n", vals.join(" ")));
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Prob {
        Prob::new(n.into(), d.into())
    }

    #[test]
    fn mod2_half_is_uniform() {
        let s = builtin("mod2@1/2").unwrap();
        let j = s.joint_distribution();
        assert_eq!(j.dist.len(), 4);
        assert!(j.dist.iter().all(|(_, p)| *p == r(1, 4)));
        assert!(s.ci_query(&SeparationQuery::pair(0, 1, NodeSet::EMPTY).unwrap()).unwrap());
    }

    #[test]
    fn mod2_third_is_dependent() {
        let s = builtin("mod2@1/3").unwrap();
        assert!(!s.ci_query(&SeparationQuery::pair(0, 1, NodeSet::EMPTY).unwrap()).unwrap());
    }

    #[test]
    fn xor3_table() {
        let s = builtin("xor3").unwrap();
        let j = s.joint_distribution();
        // Oracle: X1 = X2 ^ X3 ^ e1 with e1 ~ Bern(1/3), X2, X3 fair coins.
        for x2 in 0..2 {
            for x3 in 0..2 {
                for x1 in 0..2 {
                    let want = if x1 == x2 ^ x3 { r(2, 12) } else { r(1, 12) };
                    assert_eq!(j.dist.get(&[x1, x2, x3]), want);
                }
            }
        }
        assert_eq!(j.marginal(NodeSet::singleton(0)).get(&[1]), r(1, 2));
        let q = |a: usize, b: NodeSet, c: NodeSet| j.independent(NodeSet::singleton(a), b, c).unwrap();
        assert!(q(0, NodeSet::singleton(1), NodeSet::EMPTY));
        assert!(q(0, NodeSet::singleton(2), NodeSet::EMPTY));
        assert!(!q(0, NodeSet::from_iter([1, 2]), NodeSet::EMPTY));
        assert!(!q(0, NodeSet::singleton(1), NodeSet::singleton(2)));
    }

    #[test]
    fn deterministic_scm_is_a_point_mass() {
        let g = Graph::from_edges(&["a", "b"], &[("a", "b")], &[]);
        let block = |v| NoiseBlock { nodes: vec![v], table: vec![(vec![0], r(1, 1))] };
        let s = Scm::from_fn(g, vec![vec![0, 1], vec![0, 1]], vec![block(0), block(1)], |v, _, _| v as Value).unwrap();
        let j = s.joint_distribution();
        assert_eq!(j.dist.len(), 1);
        assert_eq!(j.dist.get(&[0, 1]), r(1, 1));
    }

    #[test]
    fn induced_models() {
        let x = builtin("xor3").unwrap().induced_model().unwrap();
        assert!(x.pair(0, 1, NodeSet::EMPTY));
        assert!(x.pair(0, 2, NodeSet::EMPTY));
        assert!(!x.contains(NodeSet::singleton(0), NodeSet::from_iter([1, 2]), NodeSet::EMPTY));
        let g = Graph::from_edges(&["a", "b", "c"], &[], &[]);
        let coin = |v| NoiseBlock { nodes: vec![v], table: vec![(vec![0], r(1, 2)), (vec![1], r(1, 2))] };
        let s = Scm::from_fn(g, vec![vec![0, 1]; 3], vec![coin(0), coin(1), coin(2)], |_, _, e| e).unwrap();
        let full = IndependenceModel::full(s.graph().labels().to_vec()).unwrap();
        assert!(s.induced_model().unwrap().same_statements(&full));
    }

    #[test]
    fn validation_errors() {
        let g = Graph::from_edges(&["a", "b"], &[], &[("a", "b")]);
        // Independent noises across an arc are rejected.
        let table = vec![(vec![0, 0], r(1, 4)), (vec![0, 1], r(1, 4)), (vec![1, 0], r(1, 4)), (vec![1, 1], r(1, 4))];
        let block = NoiseBlock { nodes: vec![0, 1], table };
        let e = Scm::from_fn(g.clone(), vec![vec![0, 1]; 2], vec![block], |_, _, e| e).unwrap_err();
        assert!(matches!(e, ScmError::NoiseDependence { dependent: true, .. }));
        // Splitting a district is rejected.
        let coin = |v| NoiseBlock { nodes: vec![v], table: vec![(vec![0], r(1, 2)), (vec![1], r(1, 2))] };
        let e = Scm::from_fn(g, vec![vec![0, 1]; 2], vec![coin(0), coin(1)], |_, _, e| e).unwrap_err();
        assert!(matches!(e, ScmError::BadBlocks(_)));
        // Outputs must stay in the value set.
        let g = Graph::from_edges(&["a"], &[], &[]);
        let e = Scm::from_fn(g, vec![vec![0, 1]], vec![coin(0)], |_, _, e| e + 5).unwrap_err();
        assert!(matches!(e, ScmError::OutOfSupport { .. }));
    }
}

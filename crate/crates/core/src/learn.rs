// SPDX-License-Identifier: MIT
//! Reference natural learner, Markov equivalence and end-to-end audits.
//!
//! The learner is exhaustive: every assignment of `->`, `<-` or `<->` to the
//! edges of the model skeleton is built, then filtered by ancestrality,
//! maximality and ordered upward- and downward-stability with respect to the
//! candidate's own minimal order, in that order. Candidates are numbered in
//! base 3 (base 2 for DAGs) over the sorted skeleton edges, so the output
//! order does not depend on how the work is split across threads.

use rayon::prelude::*;
use thiserror::Error;

use crate::graph::{
    collider_v_configurations, minimal_collider_paths, minimal_order, Graph, GraphError, PartialOrder, Path,
    VConfiguration,
};
use crate::imodel::{
    check_property, converse_pairwise_markov, is_markovian, orientation_faithful, path_stable, skeleton_of_model,
    v_stable, IndependenceModel, ModelError, PropertyId, Triple,
};
use crate::imodel::graph_model;
use crate::report::{AuditReport, LedgerEntry};
use crate::separation::is_maximal;
use crate::Verdict;

/// Largest skeleton the learner accepts without an explicit override.
pub const EDGE_BUDGET: usize = 12;

#[derive(Debug, Error)]
pub enum LearnError {
    #[error("no orientation of the skeleton is ancestral, maximal and ordered-stable")]
    NoStableOrientation,
    #[error("skeleton has {edges} edges; the budget is {max}")]
    TooManyEdges { edges: usize, max: usize },
    #[error("{0}")]
    ClassMismatch(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, Copy)]
pub struct LearnOptions {
    pub dag_only: bool,
    pub edge_budget: usize,
    pub parallel: bool,
}

impl Default for LearnOptions {
    fn default() -> Self {
        LearnOptions { dag_only: false, edge_budget: EDGE_BUDGET, parallel: true }
    }
}

impl LearnOptions {
    pub fn dags(dag_only: bool) -> Self {
        LearnOptions { dag_only, ..Default::default() }
    }
}

#[derive(Debug, Clone)]
pub struct LearnerOutput {
    /// All stable orientations, in candidate order.
    pub graphs: Vec<Graph>,
    /// The member with the lexicographically smallest serialization.
    pub chosen: Graph,
    pub dag_only: bool,
    /// Minimal order of each graph, aligned with `graphs`.
    pub orders: Vec<PartialOrder>,
}

fn candidate(j: &IndependenceModel, edges: &[(usize, usize)], mut code: u64, base: u64) -> Option<Graph> {
    let mut g = Graph::new(j.labels().iter().cloned()).expect("labels come from a valid model");
    for &(a, b) in edges {
        let digit = code % base;
        code /= base;
        match digit {
            0 => g.add_arrow(a, b),
            1 => g.add_arrow(b, a),
            _ => g.add_arc(a, b),
        }
        .expect("skeleton edges are distinct pairs");
    }
    if !g.is_ancestral().holds() || !is_maximal(&g).holds() {
        return None;
    }
    let ord = minimal_order(&g).ok()?;
    for p in [PropertyId::OrderedUpward, PropertyId::OrderedDownward] {
        if !check_property(j, p, Some(&ord)).ok()?.holds() {
            return None;
        }
    }
    Some(g)
}

pub fn stable_orientations_with(j: &IndependenceModel, opts: LearnOptions) -> Result<Vec<Graph>, LearnError> {
    let edges = skeleton_of_model(j).edges();
    if edges.len() > opts.edge_budget {
        return Err(LearnError::TooManyEdges { edges: edges.len(), max: opts.edge_budget });
    }
    let base: u64 = if opts.dag_only { 2 } else { 3 };
    let total = base.pow(edges.len() as u32);
    let out = if opts.parallel {
        (0..total).into_par_iter().filter_map(|c| candidate(j, &edges, c, base)).collect()
    } else {
        (0..total).filter_map(|c| candidate(j, &edges, c, base)).collect()
    };
    Ok(out)
}

pub fn stable_orientations(j: &IndependenceModel, dag_only: bool) -> Result<Vec<Graph>, LearnError> {
    stable_orientations_with(j, LearnOptions::dags(dag_only))
}

pub fn natural_learn_with(j: &IndependenceModel, opts: LearnOptions) -> Result<LearnerOutput, LearnError> {
    let graphs = stable_orientations_with(j, opts)?;
    let chosen = graphs
        .iter()
        .min_by_key(|g| g.to_text())
        .cloned()
        .ok_or(LearnError::NoStableOrientation)?;
    let orders = graphs.iter().map(|g| minimal_order(g).expect("outputs are ancestral")).collect();
    Ok(LearnerOutput { graphs, chosen, dag_only: opts.dag_only, orders })
}

pub fn natural_learn(j: &IndependenceModel, dag_only: bool) -> Result<LearnerOutput, LearnError> {
    natural_learn_with(j, LearnOptions::dags(dag_only))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    DagCriterion,
    MagCriterion,
    BruteForce,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::DagCriterion => "dag",
            Method::MagCriterion => "mag",
            Method::BruteForce => "brute",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "dag" => Ok(Method::DagCriterion),
            "mag" => Ok(Method::MagCriterion),
            "brute" => Ok(Method::BruteForce),
            _ => Err(format!("unknown method `{s}` (expected dag, mag or brute)")),
        }
    }
}

/// Why two graphs differ. `in_first` tells which graph has the feature.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EquivalenceWitness {
    Skeleton { a: usize, b: usize, in_first: bool },
    VConfiguration { v: VConfiguration, in_first: bool },
    ColliderPath { path: Path, in_first: bool },
    Separation { triple: Triple, in_first: bool },
}

impl EquivalenceWitness {
    /// Recomputes the distinguishing feature on both graphs.
    pub fn recheck(&self, g: &Graph, h: &Graph) -> bool {
        let (has, lacks) = if self.in_first() { (g, h) } else { (h, g) };
        match self {
            EquivalenceWitness::Skeleton { a, b, .. } => has.adjacent(*a, *b) && !lacks.adjacent(*a, *b),
            EquivalenceWitness::VConfiguration { v, .. } => {
                collider_v_configurations(has).contains(v) && !collider_v_configurations(lacks).contains(v)
            }
            EquivalenceWitness::ColliderPath { path, .. } => {
                let c = path.canonical();
                let of = |x: &Graph| minimal_collider_paths(x).iter().any(|p| p.canonical() == c);
                of(has) && !of(lacks)
            }
            EquivalenceWitness::Separation { triple, .. } => {
                let jh = graph_model(has);
                let jl = graph_model(lacks);
                matches!((jh, jl), (Ok(a), Ok(b)) if a.holds(triple) && !b.holds(triple))
            }
        }
    }

    fn in_first(&self) -> bool {
        match self {
            EquivalenceWitness::Skeleton { in_first, .. }
            | EquivalenceWitness::VConfiguration { in_first, .. }
            | EquivalenceWitness::ColliderPath { in_first, .. }
            | EquivalenceWitness::Separation { in_first, .. } => *in_first,
        }
    }

    pub fn render(&self, g: &Graph) -> String {
        let which = |f: bool| if f { "first" } else { "second" };
        match self {
            EquivalenceWitness::Skeleton { a, b, in_first } => {
                format!("edge {}-{} only in the {} graph", g.label(*a), g.label(*b), which(*in_first))
            }
            EquivalenceWitness::VConfiguration { v, in_first } => {
                format!("collider {} only in the {} graph", v.render(g), which(*in_first))
            }
            EquivalenceWitness::ColliderPath { path, in_first } => {
                format!("minimal collider path {} only in the {} graph", path.render(g), which(*in_first))
            }
            EquivalenceWitness::Separation { triple, in_first } => {
                format!("{} only in the {} graph", triple.render(g.labels()), which(*in_first))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivalenceVerdict {
    pub equivalent: bool,
    pub method: Method,
    pub witness: Option<EquivalenceWitness>,
}

fn skeleton_difference(g: &Graph, h: &Graph) -> Option<EquivalenceWitness> {
    for a in 0..g.n() {
        for b in a + 1..g.n() {
            if g.adjacent(a, b) != h.adjacent(a, b) {
                return Some(EquivalenceWitness::Skeleton { a, b, in_first: g.adjacent(a, b) });
            }
        }
    }
    None
}

fn first_difference<T: Ord + Clone>(x: &[T], y: &[T]) -> Option<(T, bool)> {
    let mut all: Vec<(T, bool)> = x
        .iter()
        .filter(|t| !y.contains(t))
        .map(|t| (t.clone(), true))
        .chain(y.iter().filter(|t| !x.contains(t)).map(|t| (t.clone(), false)))
        .collect();
    all.sort();
    all.into_iter().next()
}

fn canonical_paths(g: &Graph) -> Vec<Vec<usize>> {
    minimal_collider_paths(g).iter().map(|p| p.canonical().0).collect()
}

pub fn markov_equivalent(g: &Graph, h: &Graph, method: Method) -> Result<EquivalenceVerdict, LearnError> {
    if !g.same_nodes(h) {
        return Err(ModelError::UniverseMismatch.into());
    }
    g.require_ancestral()?;
    h.require_ancestral()?;
    match method {
        Method::DagCriterion if !(g.is_dag() && h.is_dag()) => {
            return Err(LearnError::ClassMismatch("the DAG criterion needs two DAGs".into()));
        }
        Method::MagCriterion if !(is_maximal(g).holds() && is_maximal(h).holds()) => {
            return Err(LearnError::ClassMismatch("the MAG criterion needs two maximal ancestral graphs".into()));
        }
        _ => {}
    }
    let witness = match skeleton_difference(g, h) {
        Some(w) => Some(w),
        None => match method {
            Method::DagCriterion => first_difference(&collider_v_configurations(g), &collider_v_configurations(h))
                .map(|(v, in_first)| EquivalenceWitness::VConfiguration { v, in_first }),
            Method::MagCriterion => first_difference(&canonical_paths(g), &canonical_paths(h))
                .map(|(p, in_first)| EquivalenceWitness::ColliderPath { path: Path(p), in_first }),
            Method::BruteForce => {
                let (jg, jh) = (graph_model(g)?, graph_model(h)?);
                match jh.first_missing_from(&jg) {
                    Some(t) => Some(EquivalenceWitness::Separation { triple: t, in_first: false }),
                    None => jg
                        .first_missing_from(&jh)
                        .map(|t| EquivalenceWitness::Separation { triple: t, in_first: true }),
                }
            }
        },
    };
    Ok(EquivalenceVerdict { equivalent: witness.is_none(), method, witness })
}

/// Criterion that fits both graphs: DAG, then MAG, then brute force.
pub fn best_method(g: &Graph, h: &Graph) -> Method {
    if g.is_dag() && h.is_dag() {
        Method::DagCriterion
    } else if is_maximal(g).holds() && is_maximal(h).holds() {
        Method::MagCriterion
    } else {
        Method::BruteForce
    }
}

pub fn equivalent(g: &Graph, h: &Graph) -> Result<bool, LearnError> {
    Ok(markov_equivalent(g, h, best_method(g, h))?.equivalent)
}

/// First member not equivalent to the first one; equivalence is an
/// equivalence relation, so this settles pairwise equivalence.
fn first_inequivalent(graphs: &[Graph]) -> Result<Verdict<(Graph, Graph)>, LearnError> {
    let Some(first) = graphs.first() else { return Ok(Verdict::Holds) };
    for g in &graphs[1..] {
        if !equivalent(first, g)? {
            return Ok(Verdict::Fails((first.clone(), g.clone())));
        }
    }
    Ok(Verdict::Holds)
}

/// All stable orientations are pairwise Markov equivalent.
pub fn uniqueness_property(j: &IndependenceModel) -> Result<Verdict<(Graph, Graph)>, LearnError> {
    first_inequivalent(&stable_orientations(j, false)?)
}

/// As [`uniqueness_property`], over DAG orientations only.
pub fn dag_uniqueness_property(j: &IndependenceModel) -> Result<Verdict<(Graph, Graph)>, LearnError> {
    first_inequivalent(&stable_orientations(j, true)?)
}

fn verdict_text<W>(v: Verdict<W>, f: impl FnOnce(W) -> String) -> Verdict<String> {
    v.map(f)
}

/// Outputs all equivalent to `g0`; an empty output set is a failure.
fn learner_matches(graphs: &[Graph], g0: &Graph) -> Result<Verdict<String>, LearnError> {
    if graphs.is_empty() {
        return Ok(Verdict::Fails("no stable orientation".into()));
    }
    for g in graphs {
        if !equivalent(g, g0)? {
            return Ok(Verdict::Fails(format!("output not equivalent: {:?}", g)));
        }
    }
    Ok(Verdict::Holds)
}

/// Audits a model against a presumed causal graph: the hypotheses of the
/// skeleton-recovery and learner-equivalence guarantees, their conclusions
/// and the derived faithfulness-type flags.
pub fn audit(j: &IndependenceModel, g0: &Graph) -> Result<AuditReport, LearnError> {
    audit_with(j, g0, LearnOptions::default())
}

pub fn audit_with(j: &IndependenceModel, g0: &Graph, opts: LearnOptions) -> Result<AuditReport, LearnError> {
    if j.labels() != g0.labels() {
        return Err(ModelError::UniverseMismatch.into());
    }
    let ord = minimal_order(g0)?;
    let mut r = AuditReport::new("model audit");
    let prop = |p: PropertyId, o: Option<&PartialOrder>| -> Result<Verdict<String>, LearnError> {
        Ok(check_property(j, p, o)?.map(|w| w.render(j)))
    };

    let g0_maximal = is_maximal(g0).map(|(a, b)| format!("{} and {} cannot be separated", g0.label(a), g0.label(b)));
    r.push("g0_maximal", g0_maximal);
    r.push("markovian", is_markovian(j, g0)?.map(|t| format!("{} missing", j.render(&t))));
    r.push(
        "converse_pairwise",
        converse_pairwise_markov(j, g0)?.map(|(a, b)| {
            format!("{} holds for adjacent {}, {}", j.render(&Triple::pair(a, b, g0.anc_pair(a, b))), j.label(a), j.label(b))
        }),
    );
    r.push("ordered_up", prop(PropertyId::OrderedUpward, Some(&ord))?);
    r.push("ordered_down", prop(PropertyId::OrderedDownward, Some(&ord))?);
    r.push("path_stable", verdict_text(path_stable(j), |w| w.render(j)));
    r.push("v_stable", verdict_text(v_stable(j), |w| w.render(j)));

    let sk = skeleton_of_model(j);
    let skeleton_match = if g0.skeleton() == sk {
        Verdict::Holds
    } else {
        let (a, b) = (0..j.n())
            .flat_map(|a| (a + 1..j.n()).map(move |b| (a, b)))
            .find(|&(a, b)| g0.adjacent(a, b) != sk.adjacent(a, b))
            .expect("skeletons differ somewhere");
        let side = if g0.adjacent(a, b) { "graph" } else { "model" };
        Verdict::Fails(format!("edge {}-{} only in the {side} skeleton", j.label(a), j.label(b)))
    };
    r.push("skeleton_match", skeleton_match);

    let outputs = stable_orientations_with(j, LearnOptions { dag_only: false, ..opts })?;
    r.push("learner_equivalent", learner_matches(&outputs, g0)?);
    let dag_outputs = stable_orientations_with(j, LearnOptions { dag_only: true, ..opts })?;
    if g0.is_dag() {
        r.push("dag_learner_equivalent", learner_matches(&dag_outputs, g0)?);
    }
    let render_pair = |(a, b): (Graph, Graph)| format!("{a:?} vs {b:?}");
    r.push("uniqueness", first_inequivalent(&outputs)?.map(render_pair));
    r.push("dag_uniqueness", first_inequivalent(&dag_outputs)?.map(render_pair));

    let jg = graph_model(g0)?;
    let minimally = match (is_markovian(j, g0)?.holds(), g0.skeleton() == sk) {
        (true, true) => Verdict::Holds,
        (false, _) => Verdict::Fails("not Markovian".to_string()),
        (true, false) => Verdict::Fails("skeletons differ".to_string()),
    };
    r.push("minimally_markovian", minimally);
    let faithful = match j.first_missing_from(&jg) {
        Some(t) => Verdict::Fails(format!("{} holds but is not a separation", j.render(&t))),
        None => jg.first_missing_from(j).map(|t| format!("{} missing", j.render(&t))).into(),
    };
    r.push("faithful", faithful);
    r.push("singleton_transitive", prop(PropertyId::SingletonTransitivity, None)?);
    let mut graphoid = Verdict::Holds;
    for p in [
        PropertyId::Symmetry,
        PropertyId::Decomposition,
        PropertyId::WeakUnion,
        PropertyId::Contraction,
        PropertyId::Intersection,
    ] {
        if let Verdict::Fails(w) = prop(p, None)? {
            graphoid = Verdict::Fails(w);
            break;
        }
    }
    r.push("graphoid", graphoid);
    r.push("compositional", prop(PropertyId::Composition, None)?);
    r.push("orientation_faithful", orientation_faithful(j, g0)?.map(|w| w.render(g0)));

    let f = |name: &str| r.flag(name).unwrap_or(false);
    let recovery = f("g0_maximal") && f("markovian") && f("converse_pairwise") && f("ordered_up") && f("ordered_down");
    let mut ledger = vec![
        LedgerEntry::new("skeleton_recovery", Some(recovery), f("skeleton_match")),
        LedgerEntry::new("minimal_markov", Some(recovery), f("minimally_markovian")),
        LedgerEntry::new("learner_equivalence", Some(recovery && f("path_stable")), f("learner_equivalent")),
    ];
    ledger.push(if g0.is_dag() {
        LedgerEntry::new("dag_learner_equivalence", Some(recovery && f("v_stable")), f("dag_learner_equivalent"))
    } else {
        LedgerEntry::new("dag_learner_equivalence", None, false)
    });
    for e in ledger {
        r.ledger.push(e);
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nodeset::NodeSet;
    use crate::separation::induced_model;

    fn chain4() -> Graph {
        Graph::from_edges(&["i", "k", "l", "j"], &[("i", "k"), ("l", "k"), ("j", "l")], &[])
    }

    fn j_chain() -> IndependenceModel {
        let mut m = induced_model(&chain4()).unwrap();
        m.insert(Triple::pair(0, 3, NodeSet::singleton(1))).unwrap();
        m
    }

    fn j_diamond() -> IndependenceModel {
        let mut m = IndependenceModel::numbered(4).unwrap();
        m.insert(Triple::pair(0, 3, NodeSet::from_iter([1, 2]))).unwrap();
        m.insert(Triple::pair(0, 3, NodeSet::singleton(2))).unwrap();
        m.insert(Triple::pair(1, 2, NodeSet::singleton(3))).unwrap();
        m
    }

    fn g1() -> Graph {
        Graph::from_edges(&["1", "2", "3", "4"], &[("4", "3"), ("4", "2"), ("3", "1"), ("2", "1")], &[])
    }

    fn g2() -> Graph {
        Graph::from_edges(&["1", "2", "3", "4"], &[("4", "3"), ("4", "2"), ("3", "1")], &[("2", "1")])
    }

    #[test]
    fn chain_outputs_are_equivalent() {
        let out = natural_learn(&j_chain(), false).unwrap();
        assert!(!out.graphs.is_empty());
        for g in &out.graphs {
            assert!(markov_equivalent(g, &chain4(), Method::MagCriterion).unwrap().equivalent);
        }
        assert!(uniqueness_property(&j_chain()).unwrap().holds());
        assert!(dag_uniqueness_property(&j_chain()).unwrap().holds());
    }

    #[test]
    fn diamond_outputs() {
        let outs = stable_orientations(&j_diamond(), false).unwrap();
        assert!(outs.iter().any(|g| equivalent(g, &g1()).unwrap()));
        assert!(outs.iter().any(|g| equivalent(g, &g2()).unwrap()));
        assert!(!uniqueness_property(&j_diamond()).unwrap().holds());
        let dags = stable_orientations(&j_diamond(), true).unwrap();
        assert!(!dags.is_empty());
        assert!(dags.iter().all(|g| equivalent(g, &g1()).unwrap()));
        assert!(dag_uniqueness_property(&j_diamond()).unwrap().holds());
    }

    #[test]
    fn mag_witness_for_figure_three() {
        let v = markov_equivalent(&g1(), &g2(), Method::MagCriterion).unwrap();
        assert!(!v.equivalent);
        let w = v.witness.unwrap();
        assert!(w.recheck(&g1(), &g2()));
        match w {
            EquivalenceWitness::ColliderPath { path, in_first } => {
                assert!(!in_first);
                assert_eq!(path.canonical(), Path(vec![3, 1, 0]).canonical());
            }
            other => panic!("unexpected witness {other:?}"),
        }
        assert!(!markov_equivalent(&g1(), &g2(), Method::BruteForce).unwrap().equivalent);
        assert!(markov_equivalent(&g1(), &g2(), Method::DagCriterion).is_err());
    }

    #[test]
    fn reflexive() {
        for m in [Method::DagCriterion, Method::MagCriterion, Method::BruteForce] {
            assert!(markov_equivalent(&g1(), &g1(), m).unwrap().equivalent);
        }
    }

    #[test]
    fn no_stable_orientation() {
        // Skeleton 2 - 3 only. Every orientation leaves 2 or 3 removable
        // from a conditioning set, which would need a marginal statement.
        let mut m = IndependenceModel::numbered(3).unwrap();
        m.insert(Triple::pair(0, 1, NodeSet::singleton(2))).unwrap();
        m.insert(Triple::pair(0, 2, NodeSet::singleton(1))).unwrap();
        assert_eq!(skeleton_of_model(&m).edges(), vec![(1, 2)]);
        assert!(matches!(natural_learn(&m, false), Err(LearnError::NoStableOrientation)));
        assert!(matches!(natural_learn(&m, true), Err(LearnError::NoStableOrientation)));
        assert!(uniqueness_property(&m).unwrap().holds());
    }

    #[test]
    fn audit_chain() {
        let r = audit(&j_chain(), &chain4()).unwrap();
        for (name, want) in [
            ("markovian", true),
            ("converse_pairwise", true),
            ("ordered_up", true),
            ("ordered_down", true),
            ("v_stable", true),
            ("singleton_transitive", false),
            ("faithful", false),
            ("learner_equivalent", true),
            ("minimally_markovian", true),
        ] {
            assert_eq!(r.flag(name), Some(want), "{name}");
        }
        assert!(r.inconsistencies().is_empty());
    }

    #[test]
    fn audit_self_model() {
        let g = g2();
        let r = audit(&induced_model(&g).unwrap(), &g).unwrap();
        assert_eq!(r.flag("faithful"), Some(true));
        assert_eq!(r.flag("markovian"), Some(true));
        assert_eq!(r.flag("skeleton_match"), Some(true));
        assert!(r.inconsistencies().is_empty());
        assert!(r.flags.iter().all(|f| f.value || f.witness.is_some()));
    }
}

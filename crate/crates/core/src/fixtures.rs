// SPDX-License-Identifier: MIT
//! Bundled worked examples with expected verdicts.
//!
//! Each fixture materializes its graphs, model or SCM, runs the matching
//! audit and compares the flags against a manifest. Manifest entries are
//! tagged by origin: `Published` entries restate claims made about the
//! example in the literature, `Derived` entries were computed by this crate
//! and cross-checked by independent tests. A change in derivation can only
//! ever touch the second kind.

use std::fmt;

use crate::graph::{augment, latent_projection, minimal_order, noise_nodes, Graph};
use crate::imodel::{check_property, closure, IndependenceModel, PropertyId, Triple};
use crate::learn::{audit, markov_equivalent, LearnError, Method};
use crate::nodeset::NodeSet;
use crate::report::AuditReport;
use crate::scm::{builtin, scm_audit, Scm, ScmError};
use crate::separation::induced_model;
use crate::Verdict;

pub const FIXTURE_IDS: [&str; 9] =
    ["fig1", "fig2", "fig3", "fig4", "fig5", "mod2-half", "mod2-third", "xor3", "maxdiamond"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Origin {
    Published,
    Derived,
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Origin::Published => "published",
            Origin::Derived => "derived",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Expectation {
    pub flag: &'static str,
    pub value: bool,
    pub origin: Origin,
}

#[derive(Debug, thiserror::Error)]
pub enum FixtureError {
    #[error("unknown fixture `{0}`; known: {known}", known = FIXTURE_IDS.join(", "))]
    Unknown(String),
    #[error(transparent)]
    Learn(#[from] LearnError),
    #[error(transparent)]
    Scm(#[from] ScmError),
}

#[derive(Debug, Clone)]
pub struct Fixture {
    pub id: &'static str,
    pub summary: &'static str,
    /// Named graphs; the first is the presumed causal graph where one applies.
    pub graphs: Vec<(&'static str, Graph)>,
    pub model: Option<IndependenceModel>,
    pub scm: Option<Scm>,
    pub expected: Vec<Expectation>,
}

#[derive(Debug, Clone)]
pub struct FixtureRun {
    pub report: AuditReport,
    /// `(flag, expected, observed)` for every manifest entry that disagrees;
    /// a missing flag is reported with `observed = None`.
    pub mismatches: Vec<(Expectation, Option<bool>)>,
}

impl FixtureRun {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

fn p(flag: &'static str, value: bool) -> Expectation {
    Expectation { flag, value, origin: Origin::Published }
}

fn d(flag: &'static str, value: bool) -> Expectation {
    Expectation { flag, value, origin: Origin::Derived }
}

fn set(g: &Graph, labels: &[&str]) -> NodeSet {
    g.set_of(labels).expect("fixture labels exist")
}

fn with_pair(mut m: IndependenceModel, g: &Graph, a: &str, b: &str, c: &[&str]) -> IndependenceModel {
    let t = Triple::pair(g.node(a).unwrap(), g.node(b).unwrap(), set(g, c));
    m.insert(t).expect("fixture statements are well formed");
    m
}

pub fn fig1_graph() -> Graph {
    Graph::from_edges(&["1", "2", "3", "4"], &[("3", "1"), ("4", "2")], &[("1", "2")])
}

pub fn fig1_augmented() -> Graph {
    Graph::from_edges(
        &["1", "2", "3", "4", "eps_1", "eps_2", "eps_3", "eps_4"],
        &[("3", "1"), ("4", "2"), ("eps_1", "1"), ("eps_2", "2"), ("eps_3", "3"), ("eps_4", "4")],
        &[("eps_1", "eps_2")],
    )
}

pub fn chain4() -> Graph {
    Graph::from_edges(&["i", "k", "l", "j"], &[("i", "k"), ("l", "k"), ("j", "l")], &[])
}

/// Separations of the four-node chain plus `<i, j | k>`.
pub fn j_chain() -> IndependenceModel {
    let g = chain4();
    with_pair(induced_model(&g).unwrap(), &g, "i", "j", &["k"]).with_provenance("chain fixture")
}

pub fn diamond_g1() -> Graph {
    Graph::from_edges(&["1", "2", "3", "4"], &[("4", "3"), ("4", "2"), ("3", "1"), ("2", "1")], &[])
}

pub fn diamond_g2() -> Graph {
    Graph::from_edges(&["1", "2", "3", "4"], &[("4", "3"), ("4", "2"), ("3", "1")], &[("2", "1")])
}

pub fn j_diamond() -> IndependenceModel {
    let g = diamond_g1();
    let m = IndependenceModel::numbered(4).unwrap();
    let m = with_pair(m, &g, "1", "4", &["2", "3"]);
    let m = with_pair(m, &g, "1", "4", &["3"]);
    with_pair(m, &g, "2", "3", &["4"]).with_provenance("diamond fixture")
}

pub fn orientation_g0() -> Graph {
    Graph::from_edges(
        &["j", "k", "l", "m", "s"],
        &[("j", "l"), ("k", "l"), ("j", "m"), ("k", "s"), ("m", "s")],
        &[],
    )
}

/// Separations of the five-node graph plus `<j, k | s>`.
pub fn j_orientation() -> IndependenceModel {
    let g = orientation_g0();
    with_pair(induced_model(&g).unwrap(), &g, "j", "k", &["s"]).with_provenance("orientation fixture")
}

const FIG5_NODES: [&str; 7] = ["h", "i", "j", "k", "l", "m", "t"];

pub fn fig5_g0() -> Graph {
    Graph::from_edges(
        &FIG5_NODES,
        &[("i", "l"), ("i", "h"), ("m", "l"), ("h", "k"), ("k", "j"), ("j", "t"), ("t", "m")],
        &[],
    )
}

pub fn fig5_g1() -> Graph {
    Graph::from_edges(
        &FIG5_NODES,
        &[("i", "l"), ("h", "i"), ("m", "l"), ("h", "k"), ("k", "j"), ("j", "t"), ("t", "m")],
        &[],
    )
}

/// Separations of the second graph plus `<k, m | l>`, closed under the
/// semi-graphoid rules and ordered upward-stability for its minimal order.
pub fn j_fig5() -> IndependenceModel {
    let g1 = fig5_g1();
    let base = with_pair(induced_model(&g1).unwrap(), &g1, "k", "m", &["l"]);
    let mut rules = PropertyId::SEMI_GRAPHOID.to_vec();
    rules.push(PropertyId::OrderedUpward);
    closure(&base, &rules, Some(&minimal_order(&g1).unwrap()))
        .expect("supported rules")
        .with_provenance("closure fixture")
}

pub fn fixture(id: &str) -> Result<Fixture, FixtureError> {
    let f = match id {
        "fig1" => Fixture {
            id: "fig1",
            summary: "augmentation with noise nodes and projection back",
            graphs: vec![("G", fig1_graph()), ("augmented", fig1_augmented())],
            model: None,
            scm: None,
            expected: vec![p("augment_matches", true), p("projection_returns_graph", true)],
        },
        "fig2" => Fixture {
            id: "fig2",
            summary: "chain with an extra statement: not faithful, yet learnable",
            graphs: vec![("G0", chain4())],
            model: Some(j_chain()),
            scm: None,
            expected: vec![
                p("singleton_transitive", false),
                p("v_stable", true),
                p("uniqueness", true),
                p("learner_equivalent", true),
                p("ordered_up", true),
                p("ordered_down", true),
                p("faithful", false),
                p("markovian", true),
                d("converse_pairwise", true),
                d("minimally_markovian", true),
                d("path_stable", true),
            ],
        },
        "fig3" => Fixture {
            id: "fig3",
            summary: "diamond model with inequivalent stable orientations",
            graphs: vec![("G1", diamond_g1()), ("G2", diamond_g2())],
            model: Some(j_diamond()),
            scm: None,
            expected: vec![
                p("uniqueness", false),
                p("dag_uniqueness", true),
                p("g1_g2_equivalent", false),
                p("outputs_cover_g1_and_g2", true),
                p("markovian", true),
                d("v_stable", false),
                d("path_stable", false),
                d("dag_learner_equivalent", true),
            ],
        },
        "fig4" => Fixture {
            id: "fig4",
            summary: "V-stable model that is not orientation-faithful",
            graphs: vec![("G0", orientation_g0())],
            model: Some(j_orientation()),
            scm: None,
            expected: vec![p("v_stable", true), p("orientation_faithful", false), p("skeleton_match", true)],
        },
        "fig5" => Fixture {
            id: "fig5",
            summary: "ordered stability holds for one graph of an equivalence class only",
            graphs: vec![("G0", fig5_g0()), ("G1", fig5_g1())],
            model: Some(j_fig5()),
            scm: None,
            expected: vec![
                p("ordered_up", false),
                p("ordered_up_wrt_g1", true),
                p("g0_g1_equivalent", true),
                p("km_dependent_given_il", true),
                d("ordered_down_wrt_g1", false),
                d("learner_equivalent", false),
            ],
        },
        "mod2-half" => scm_fixture(
            "mod2-half",
            "mod-2 sum with fair noise: adjacent yet independent",
            builtin("mod2@1/2")?,
            vec![
                p("markovian", true),
                p("x1_indep_x2", true),
                p("converse_pairwise", false),
                d("non_constant_fibers", false),
                d("positivity", true),
                d("noise_injective", true),
            ],
        ),
        "mod2-third" => scm_fixture(
            "mod2-third",
            "mod-2 sum with skewed noise",
            builtin("mod2@1/3")?,
            vec![
                p("markovian", true),
                p("x1_indep_x2", false),
                d("non_constant_fibers", true),
                d("noise_injective", true),
                d("positivity", true),
                d("converse_pairwise", true),
            ],
        ),
        "xor3" => scm_fixture(
            "xor3",
            "three-node parity: pairwise independence without composition",
            builtin("xor3")?,
            vec![
                p("markovian", true),
                p("x1_indep_x2", true),
                p("x1_indep_x3", true),
                p("x1_indep_x23", false),
                p("x1_indep_x2_given_x3", false),
                p("compositional", false),
                p("ordered_up", false),
            ],
        ),
        "maxdiamond" => scm_fixture(
            "maxdiamond",
            "max mechanisms on the diamond with noise uniform on {0,1,2}",
            builtin("maxdiamond")?,
            vec![
                p("markovian", true),
                p("uniqueness", false),
                p("dag_learner_equivalent", true),
                d("induces_diamond_model", true),
                d("positivity", false),
                d("noise_injective", false),
            ],
        ),
        _ => return Err(FixtureError::Unknown(id.to_string())),
    };
    Ok(f)
}

fn scm_fixture(id: &'static str, summary: &'static str, s: Scm, expected: Vec<Expectation>) -> Fixture {
    Fixture { id, summary, graphs: vec![("G0", s.graph().clone())], model: None, scm: Some(s), expected }
}

fn truth(b: bool, why: impl FnOnce() -> String) -> Verdict<String> {
    if b {
        Verdict::Holds
    } else {
        Verdict::Fails(why())
    }
}

pub fn run_fixture(f: &Fixture) -> Result<FixtureRun, FixtureError> {
    let mut report = match f.id {
        "fig1" => {
            let (g, aug) = (&f.graphs[0].1, &f.graphs[1].1);
            let mut r = AuditReport::new("augmentation");
            let built = augment(g).map_err(LearnError::from)?;
            r.push("augment_matches", truth(&built == aug, || format!("got {built:?}")));
            let back = latent_projection(aug, noise_nodes(g.n())).map_err(LearnError::from)?;
            r.push("projection_returns_graph", truth(&back == g, || format!("got {back:?}")));
            r
        }
        "fig3" => {
            let (g1, g2) = (&f.graphs[0].1, &f.graphs[1].1);
            let j = f.model.as_ref().unwrap();
            let mut r = audit(j, g1)?;
            let v = markov_equivalent(g1, g2, Method::MagCriterion)?;
            r.push("g1_g2_equivalent", truth(v.equivalent, || v.witness.as_ref().unwrap().render(g1)));
            let outs = crate::learn::stable_orientations(j, false)?;
            let has = |h: &Graph| -> Result<bool, LearnError> {
                for o in &outs {
                    if crate::learn::equivalent(o, h)? {
                        return Ok(true);
                    }
                }
                Ok(false)
            };
            let cover = has(g1)? && has(g2)?;
            r.push("outputs_cover_g1_and_g2", truth(cover, || "a class is missing".into()));
            r
        }
        "fig5" => {
            let (g0, g1) = (&f.graphs[0].1, &f.graphs[1].1);
            let j = f.model.as_ref().unwrap();
            let mut r = audit(j, g0)?;
            let ord1 = minimal_order(g1).map_err(LearnError::from)?;
            let up1 = check_property(j, PropertyId::OrderedUpward, Some(&ord1)).map_err(LearnError::from)?;
            r.push("ordered_up_wrt_g1", up1.map(|w| w.render(j)));
            let down1 = check_property(j, PropertyId::OrderedDownward, Some(&ord1)).map_err(LearnError::from)?;
            r.push("ordered_down_wrt_g1", down1.map(|w| w.render(j)));
            let v = markov_equivalent(g0, g1, Method::DagCriterion)?;
            r.push("g0_g1_equivalent", truth(v.equivalent, || v.witness.as_ref().unwrap().render(g0)));
            let km = Triple::pair(g0.node("k").unwrap(), g0.node("m").unwrap(), set(g0, &["i", "l"]));
            r.push("km_dependent_given_il", truth(!j.holds(&km), || format!("{} holds", j.render(&km))));
            r
        }
        _ if f.scm.is_some() => {
            let s = f.scm.as_ref().unwrap();
            let mut r = scm_audit(s)?;
            let joint = s.joint_distribution();
            let ns = |v: &[usize]| NodeSet::from_iter(v.iter().copied());
            let mut ci = |name: &str, a: &[usize], b: &[usize], c: &[usize]| -> Result<(), ScmError> {
                if a.iter().chain(b).chain(c).all(|&v| v < s.n()) {
                    let holds = joint.independent(ns(a), ns(b), ns(c))?;
                    let v = if holds { Verdict::Holds } else { Verdict::Fails("dependent".to_string()) };
                    r.push(name, v);
                }
                Ok(())
            };
            ci("x1_indep_x2", &[0], &[1], &[])?;
            if s.n() == 3 {
                ci("x1_indep_x3", &[0], &[2], &[])?;
                ci("x1_indep_x23", &[0], &[1, 2], &[])?;
                ci("x1_indep_x2_given_x3", &[0], &[1], &[2])?;
            }
            if f.id == "maxdiamond" {
                let same = s.induced_model()?.same_statements(&j_diamond());
                r.push("induces_diamond_model", truth(same, || "induced model differs".into()));
            }
            r
        }
        _ => {
            let g0 = &f.graphs[0].1;
            audit(f.model.as_ref().unwrap(), g0)?
        }
    };
    report.subject = format!("fixture {}: {}", f.id, f.summary);
    report.provenance.fixtures.push(f.id.to_string());
    let mismatches = f
        .expected
        .iter()
        .filter_map(|e| {
            let got = report.flag(e.flag);
            (got != Some(e.value)).then(|| (e.clone(), got))
        })
        .collect();
    Ok(FixtureRun { report, mismatches })
}

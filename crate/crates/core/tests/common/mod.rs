// SPDX-License-Identifier: MIT
//! Shared corpus generators for the integration tests.
#![allow(dead_code)]

use ancestral::imodel::{closure, PropertyId};
use ancestral::sample::random_ancestral;
use ancestral::learn::equivalent;
use ancestral::separation::{induced_model, is_maximal};
use ancestral::{Graph, IndependenceModel, NodeSet, Triple};
use proptest::test_runner::Config;
use rand::Rng;

pub fn config(cases: u32) -> Config {
    Config { cases, failure_persistence: None, ..Config::default() }
}

/// A random pair statement over `n >= 2` nodes.
pub fn random_pair<R: Rng>(rng: &mut R, n: usize) -> Triple {
    let i = rng.gen_range(0..n);
    let mut j = rng.gen_range(0..n - 1);
    if j >= i {
        j += 1;
    }
    let c: NodeSet = (0..n).filter(|&v| v != i && v != j && rng.gen_bool(0.4)).collect();
    Triple::pair(i, j, c)
}

/// Models of mixed character: the separations of a random ancestral graph,
/// plus a few extra pair statements, sometimes closed under the
/// semi-graphoid rules.
pub fn random_model<R: Rng>(rng: &mut R, n: usize) -> IndependenceModel {
    let h = random_ancestral(rng, n, 0.5);
    let mut j = induced_model(&h).unwrap();
    if n >= 2 {
        for _ in 0..rng.gen_range(0..=2) {
            j.insert(random_pair(rng, n)).unwrap();
        }
    }
    if rng.gen_bool(0.5) {
        j = closure(&j, &PropertyId::SEMI_GRAPHOID, None).unwrap();
    }
    j
}

/// `g` with each edge dropped independently with probability `p`. The
/// result is still ancestral and every separation of `g` survives.
pub fn thinned<R: Rng>(rng: &mut R, g: &Graph, p: f64) -> Graph {
    let mut h = Graph::new(g.labels().to_vec()).unwrap();
    for e in g.edges() {
        if !rng.gen_bool(p) {
            h.add_edge(e).unwrap();
        }
    }
    h
}

/// A graph model for testing against `g`: either a thinned copy (so `g` is
/// Markovian to it) or an unrelated graph on the same labels.
pub fn graph_model_for<R: Rng>(rng: &mut R, g: &Graph) -> IndependenceModel {
    let h = if rng.gen_bool(0.5) { thinned(rng, g, 0.3) } else { random_ancestral(rng, g.n(), 0.5) };
    induced_model(&h).unwrap()
}

/// Every maximal ancestral graph on the skeleton of `g` that is Markov
/// equivalent to it, by brute force over edge orientations.
pub fn equivalence_class(g: &Graph, dags_only: bool) -> Vec<Graph> {
    let edges = g.skeleton().edges();
    let base: u64 = if dags_only { 2 } else { 3 };
    let mut out = Vec::new();
    for code in 0..base.pow(edges.len() as u32) {
        let mut h = Graph::new(g.labels().to_vec()).unwrap();
        let mut c = code;
        for &(a, b) in &edges {
            match c % base {
                0 => h.add_arrow(a, b),
                1 => h.add_arrow(b, a),
                _ => h.add_arc(a, b),
            }
            .unwrap();
            c /= base;
        }
        if h.is_ancestral().holds() && is_maximal(&h).holds() && equivalent(g, &h).unwrap() {
            out.push(h);
        }
    }
    out
}

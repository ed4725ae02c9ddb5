// SPDX-License-Identifier: MIT
//! Seeded random generators for graphs, orders and SCMs.
//!
//! Used by the property sweeps and by `--jobs` benchmarks. Every generator
//! takes an explicit RNG so a seed reproduces the whole sweep.

use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::graph::{minimal_order, Graph, PartialOrder};
use crate::nodeset::NodeSet;
use crate::scm::{Mechanism, NoiseBlock, Prob, Scm, Value};
use crate::separation::is_maximal;
use crate::Verdict;

pub use rand::SeedableRng;

pub type SweepRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SweepRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random DAG: arrows respect a shuffled total order, each present with
/// probability `density`.
pub fn random_dag<R: Rng>(rng: &mut R, n: usize, density: f64) -> Graph {
    random_ancestral_with(rng, n, density, 0.0)
}

/// Random ancestral graph. Arrows follow a shuffled total order; arcs are
/// then added between nonadjacent pairs where neither is an ancestor of the
/// other.
pub fn random_ancestral<R: Rng>(rng: &mut R, n: usize, density: f64) -> Graph {
    random_ancestral_with(rng, n, density, density / 2.0)
}

pub fn random_ancestral_with<R: Rng>(rng: &mut R, n: usize, arrow_p: f64, arc_p: f64) -> Graph {
    let mut g = Graph::with_nodes(n).expect("small graph");
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    for x in 0..n {
        for y in x + 1..n {
            if rng.gen_bool(arrow_p) {
                g.add_arrow(perm[x], perm[y]).expect("fresh pair");
            }
        }
    }
    if arc_p > 0.0 {
        let an = g.ancestor_table();
        for a in 0..n {
            for b in a + 1..n {
                if !g.adjacent(a, b) && !an[a].contains(b) && !an[b].contains(a) && rng.gen_bool(arc_p) {
                    g.add_arc(a, b).expect("fresh pair");
                }
            }
        }
    }
    g
}

/// Adds edges between inseparable nonadjacent pairs until the graph is
/// maximal: an arrow when one endpoint is an ancestor of the other, an arc
/// otherwise. The induced model is unchanged.
pub fn make_maximal(mut g: Graph) -> Graph {
    while let Verdict::Fails((a, b)) = is_maximal(&g) {
        if g.ancestors(b).contains(a) {
            g.add_arrow(a, b).expect("nonadjacent");
        } else if g.ancestors(a).contains(b) {
            g.add_arrow(b, a).expect("nonadjacent");
        } else {
            g.add_arc(a, b).expect("nonadjacent");
        }
    }
    g
}

pub fn random_maximal<R: Rng>(rng: &mut R, n: usize, density: f64) -> Graph {
    make_maximal(random_ancestral(rng, n, density))
}

/// A random valid order of `g`: the minimal order extended by random
/// comparabilities that keep every arc's endpoints incomparable.
pub fn random_valid_order<R: Rng>(rng: &mut R, g: &Graph) -> PartialOrder {
    let mut ord = minimal_order(g).expect("ancestral graph");
    let mut pairs: Vec<(usize, usize)> =
        (0..g.n()).flat_map(|a| (0..g.n()).filter(move |&b| b != a).map(move |b| (a, b))).collect();
    pairs.shuffle(rng);
    for (a, b) in pairs {
        if ord.comparable(a, b) || !rng.gen_bool(0.3) {
            continue;
        }
        if let Some(next) = ord.extended(a, b) {
            if g.is_valid_order(&next).expect("same domain").holds() {
                ord = next;
            }
        }
    }
    ord
}

/// How mechanism tables are filled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MechanismKind {
    /// Arbitrary outputs.
    Random,
    /// Injective in the noise for every parent assignment; value sets are
    /// widened when needed to make room.
    Injective,
    /// All value sets share one size `k` and `x_i = π(τ(ε_i) + Σ a_p x_p mod k)`
    /// with random permutations `π`, `τ` and units `a_p`. Injective and
    /// surjective in the noise; `k` is a multiple of `2^arcs` at every node.
    Bijective,
}

#[derive(Debug, Clone, Copy)]
pub struct ScmSpec {
    pub n: usize,
    pub max_support: usize,
    pub arrow_p: f64,
    pub arc_p: f64,
    pub kind: MechanismKind,
    /// Probability that a latent noise variable is uniform rather than
    /// randomly weighted.
    pub uniform_p: f64,
}

impl Default for ScmSpec {
    fn default() -> Self {
        ScmSpec { n: 4, max_support: 3, arrow_p: 0.5, arc_p: 0.25, kind: MechanismKind::Random, uniform_p: 0.3 }
    }
}

/// Random distribution on `0..k` with small-denominator rational weights.
fn random_weights<R: Rng>(rng: &mut R, k: usize, uniform_p: f64) -> Vec<Prob> {
    let w: Vec<i64> = if rng.gen_bool(uniform_p) { vec![1; k] } else { (0..k).map(|_| rng.gen_range(1..=4)).collect() };
    let total: i64 = w.iter().sum();
    w.into_iter().map(|x| Prob::new(x.into(), total.into())).collect()
}

/// Noise for one district. Each member owns a private latent, and each arc
/// owns a shared non-degenerate binary latent. A member's noise value encodes
/// its private latent together with the latents of its arcs, so two groups
/// of members are dependent exactly when an arc joins them.
fn district_block<R: Rng>(rng: &mut R, g: &Graph, d: NodeSet, own: &[usize], uniform_p: f64) -> NoiseBlock {
    let nodes: Vec<usize> = d.iter().collect();
    let arcs: Vec<(usize, usize)> =
        nodes.iter().flat_map(|&a| g.spouses(a).iter().filter(move |&b| b > a).map(move |b| (a, b))).collect();
    let mut latents: Vec<Vec<Prob>> = nodes.iter().map(|&v| random_weights(rng, own[v], uniform_p)).collect();
    for _ in &arcs {
        let p = Prob::new(rng.gen_range(1..=3).into(), 4.into());
        latents.push(vec![Prob::one() - &p, p]);
    }
    let sizes: Vec<Value> = latents.iter().map(|l| l.len() as Value).collect();
    let ranges: Vec<Vec<Value>> = sizes.iter().map(|&k| (0..k).collect()).collect();
    let refs: Vec<&[Value]> = ranges.iter().map(|r| r.as_slice()).collect();
    let mut table: std::collections::BTreeMap<Vec<Value>, Prob> = Default::default();
    for assignment in crate::scm::product(&refs) {
        let p = assignment.iter().zip(&latents).fold(Prob::one(), |acc, (&x, l)| acc * &l[x as usize]);
        let row: Vec<Value> = nodes
            .iter()
            .enumerate()
            .map(|(pos, &v)| {
                let mut code = assignment[pos];
                let mut base = sizes[pos];
                for (ai, &(a, b)) in arcs.iter().enumerate() {
                    if a == v || b == v {
                        code += base * assignment[nodes.len() + ai];
                        base *= 2;
                    }
                }
                code
            })
            .collect();
        *table.entry(row).or_insert_with(Prob::zero) += p;
    }
    NoiseBlock { nodes, table: table.into_iter().collect() }
}

fn gcd(a: Value, b: Value) -> Value {
    if b == 0 { a } else { gcd(b, a % b) }
}

/// Random valid SCM over a random ancestral graph.
pub fn random_scm<R: Rng>(rng: &mut R, spec: ScmSpec) -> Scm {
    let g = random_ancestral_with(rng, spec.n, spec.arrow_p, spec.arc_p);
    random_scm_on(rng, g, spec)
}

/// Random valid SCM over the given ancestral graph.
pub fn random_scm_on<R: Rng>(rng: &mut R, g: Graph, spec: ScmSpec) -> Scm {
    let n = g.n();
    let arc_count: Vec<usize> = (0..n).map(|v| g.spouses(v).len()).collect();
    let mut own = vec![1; n];
    let mut support_size = vec![1; n];
    let common = {
        let step = 1usize << arc_count.iter().copied().max().unwrap_or(0);
        let want = rng.gen_range(2..=spec.max_support.max(2));
        want.div_ceil(step) * step
    };
    for v in 0..n {
        let k = rng.gen_range(1..=spec.max_support.max(1));
        match spec.kind {
            MechanismKind::Random => {
                support_size[v] = k;
                own[v] = rng.gen_range(1..=spec.max_support.max(1));
            }
            MechanismKind::Injective => {
                let shared = 1usize << arc_count[v];
                own[v] = k.div_ceil(shared).max(1);
                support_size[v] = (own[v] * shared).max(rng.gen_range(1..=spec.max_support.max(1)));
            }
            MechanismKind::Bijective => {
                own[v] = common >> arc_count[v];
                support_size[v] = common;
            }
        }
    }
    let blocks: Vec<NoiseBlock> =
        g.districts().into_iter().map(|d| district_block(rng, &g, d, &own, spec.uniform_p)).collect();
    let supports: Vec<Vec<Value>> = support_size.iter().map(|&k| (0..k as Value).collect()).collect();
    let mut noise_support = vec![Vec::new(); n];
    for b in &blocks {
        for (pos, &v) in b.nodes.iter().enumerate() {
            let mut vals: Vec<Value> = b.table.iter().filter(|r| !r.1.is_zero()).map(|r| r.0[pos]).collect();
            vals.sort();
            vals.dedup();
            noise_support[v] = vals;
        }
    }
    let mut mechanisms = Vec::with_capacity(n);
    for v in 0..n {
        let pa: Vec<&[Value]> = g.parents(v).iter().map(|p| supports[p].as_slice()).collect();
        let mut m = Mechanism::default();
        if spec.kind == MechanismKind::Bijective {
            let k = common as Value;
            let units: Vec<Value> = (1..k).filter(|&a| gcd(a, k) == 1).collect();
            let coef: Vec<Value> = pa.iter().map(|_| *units.choose(rng).unwrap_or(&1)).collect();
            let mut pi: Vec<Value> = (0..k).collect();
            let mut tau: Vec<Value> = (0..k).collect();
            pi.shuffle(rng);
            tau.shuffle(rng);
            for xs in crate::scm::product(&pa) {
                let shift: Value = xs.iter().zip(&coef).map(|(x, a)| x * a).sum();
                for &e in &noise_support[v] {
                    m.table.insert((xs.clone(), e), pi[((tau[e as usize] + shift) % k) as usize]);
                }
            }
            mechanisms.push(m);
            continue;
        }
        for xs in crate::scm::product(&pa) {
            let mut outs = supports[v].clone();
            outs.shuffle(rng);
            for (i, &e) in noise_support[v].iter().enumerate() {
                let out = match spec.kind {
                    MechanismKind::Random => supports[v][rng.gen_range(0..supports[v].len())],
                    _ => outs[i],
                };
                m.table.insert((xs.clone(), e), out);
            }
        }
        mechanisms.push(m);
    }
    Scm::new(g, supports, blocks, mechanisms).expect("generated SCMs are valid by construction")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scm::{check_noise_injective, check_noise_surjective};

    #[test]
    fn generated_graphs_have_their_class() {
        let mut r = rng(7);
        for _ in 0..200 {
            let n = r.gen_range(1..=6);
            assert!(random_ancestral(&mut r, n, 0.5).is_ancestral().holds());
            assert!(random_dag(&mut r, n, 0.5).is_dag());
            let m = random_maximal(&mut r, n, 0.5);
            assert!(m.is_ancestral().holds() && is_maximal(&m).holds());
            let ord = random_valid_order(&mut r, &m);
            assert!(m.is_valid_order(&ord).unwrap().holds());
        }
    }

    #[test]
    fn generated_scms_validate() {
        let mut r = rng(11);
        for kind in [MechanismKind::Random, MechanismKind::Injective, MechanismKind::Bijective] {
            for _ in 0..60 {
                let s = random_scm(&mut r, ScmSpec { kind, ..Default::default() });
                if kind != MechanismKind::Random {
                    assert!(check_noise_injective(&s).holds());
                }
                if kind == MechanismKind::Bijective {
                    assert!(check_noise_surjective(&s).unwrap().holds());
                }
            }
        }
    }

    #[test]
    fn seeds_reproduce() {
        let a = random_scm(&mut rng(3), ScmSpec::default());
        let b = random_scm(&mut rng(3), ScmSpec::default());
        assert_eq!(crate::scm::write_scm(&a), crate::scm::write_scm(&b));
    }
}

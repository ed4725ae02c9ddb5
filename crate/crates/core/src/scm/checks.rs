// SPDX-License-Identifier: MIT
//! Conditions on an SCM under which adjacency forces dependence, and the
//! composite SCM audit.

use num_traits::Zero;

use super::{Prob, Scm, ScmError, Value};
use crate::learn::{audit, LearnError};
use crate::nodeset::NodeSet;
use crate::report::{AuditReport, LedgerEntry};
use crate::Verdict;

/// `P(X_a = x_a) > 0` and `P(X_b = x_b) > 0` but `P(x_a, x_b) = 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PositivityWitness {
    pub b: NodeSet,
    pub a: NodeSet,
    pub x_a: Vec<Value>,
    pub x_b: Vec<Value>,
}

/// Whenever `x_a` and `x_b` each have positive probability, so does the
/// pair. On finite supports this is the same as the joint support being
/// the product of the single-node supports.
pub fn check_positivity(s: &Scm) -> Verdict<PositivityWitness> {
    let joint = s.joint_distribution();
    let n = s.n();
    let cells: usize = (0..n).map(|v| joint.marginal(NodeSet::singleton(v)).len()).product();
    if joint.dist.len() == cells {
        return Verdict::Holds;
    }
    let all = s.graph().all();
    for b in all.nonempty_subsets() {
        let mb = joint.marginal(b);
        for a in all.difference(b).nonempty_subsets() {
            let ma = joint.marginal(a);
            let ab = a.union(b);
            let mab = joint.marginal(ab);
            for (x_a, _) in ma.iter() {
                for (x_b, _) in mb.iter() {
                    // Columns of `ab` in increasing node order.
                    let key: Vec<Value> = ab
                        .iter()
                        .map(|v| {
                            if a.contains(v) {
                                x_a[a.iter().position(|u| u == v).unwrap()]
                            } else {
                                x_b[b.iter().position(|u| u == v).unwrap()]
                            }
                        })
                        .collect();
                    if mab.get(&key).is_zero() {
                        return Verdict::Fails(PositivityWitness { b, a, x_a: x_a.clone(), x_b: x_b.clone() });
                    }
                }
            }
        }
    }
    unreachable!("a joint support smaller than the product has a missing pair")
}

/// Two noise values giving the same output for the same parents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InjectivityWitness {
    pub node: usize,
    pub parents: Vec<Value>,
    pub e1: Value,
    pub e2: Value,
}

pub(crate) fn injectivity_at(s: &Scm, v: usize) -> Option<InjectivityWitness> {
    let es = s.noise_support(v);
    for xs in s.parent_tuples(v) {
        for (i, &e1) in es.iter().enumerate() {
            for &e2 in &es[i + 1..] {
                if s.apply(v, &xs, e1) == s.apply(v, &xs, e2) {
                    return Some(InjectivityWitness { node: v, parents: xs, e1, e2 });
                }
            }
        }
    }
    None
}

pub fn check_noise_injective(s: &Scm) -> Verdict<InjectivityWitness> {
    (0..s.n()).find_map(|v| injectivity_at(s, v)).into()
}

/// Node and parent at which every fiber probability is constant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FiberWitness {
    pub node: usize,
    pub parent: usize,
}

/// Whether `k(x_p) = P(φ_v(x_F, x_p, ε_v) ∈ S)` varies over the values of
/// parent `p` seen with some positive-probability `x_F` of the other
/// parents. Singleton sets `S` suffice: a varying `k_S` is a sum of
/// singleton terms, one of which must vary.
fn fiber_varies(s: &Scm, joint: &super::JointTable, v: usize, p: usize) -> bool {
    let pa = s.graph().parents(v);
    let pos_p = pa.iter().position(|u| u == p).unwrap();
    let noise = s.noise_marginal(v);
    let m_fp = joint.marginal(pa);
    let mut groups: std::collections::BTreeMap<Vec<Value>, Vec<Vec<Value>>> = Default::default();
    for (xs, _) in m_fp.iter() {
        let mut key = xs.clone();
        key.remove(pos_p);
        groups.entry(key).or_default().push(xs.clone());
    }
    for tuples in groups.values() {
        if tuples.len() < 2 {
            continue;
        }
        for &out in s.support(v) {
            let k = |xs: &Vec<Value>| -> Prob {
                noise
                    .iter()
                    .filter(|(e, _)| s.apply(v, xs, e[0]) == out)
                    .fold(Prob::zero(), |acc, (_, q)| acc + q)
            };
            let first = k(&tuples[0]);
            if tuples[1..].iter().any(|t| k(t) != first) {
                return true;
            }
        }
    }
    false
}

pub fn check_non_constant_fibers(s: &Scm) -> Verdict<FiberWitness> {
    let joint = s.joint_distribution();
    for v in 0..s.n() {
        for p in s.graph().parents(v) {
            if !fiber_varies(s, &joint, v, p) {
                return Verdict::Fails(FiberWitness { node: v, parent: p });
            }
        }
    }
    Verdict::Holds
}

/// Node, parent and values of the other parents for which no output value
/// has noise preimages covering the noise support.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurjectivityWitness {
    pub node: usize,
    pub parent: usize,
    pub others: Vec<Value>,
}

pub(crate) fn surjectivity_at(s: &Scm, v: usize) -> Result<Option<SurjectivityWitness>, ScmError> {
    if injectivity_at(s, v).is_some() {
        return Err(ScmError::NotInjective { node: s.graph().label(v).to_string() });
    }
    let es = s.noise_support(v);
    let pa: Vec<usize> = s.graph().parents(v).iter().collect();
    for (pos, &p) in pa.iter().enumerate() {
        let rest: Vec<&[Value]> =
            pa.iter().filter(|&&u| u != p).map(|&u| s.support(u)).collect();
        for others in super::product(&rest) {
            let covered = s.support(v).iter().any(|&out| {
                let mut pre: Vec<Value> = s
                    .support(p)
                    .iter()
                    .filter_map(|&xp| {
                        let mut xs = others.clone();
                        xs.insert(pos, xp);
                        es.iter().copied().find(|&e| s.apply(v, &xs, e) == out)
                    })
                    .collect();
                pre.sort();
                pre.dedup();
                pre == es
            });
            if !covered {
                return Ok(Some(SurjectivityWitness { node: v, parent: p, others }));
            }
        }
    }
    Ok(None)
}

/// Requires noise injectivity, otherwise the inverse is undefined.
pub fn check_noise_surjective(s: &Scm) -> Result<Verdict<SurjectivityWitness>, ScmError> {
    for v in 0..s.n() {
        if let Some(w) = surjectivity_at(s, v)? {
            return Ok(Verdict::Fails(w));
        }
    }
    Ok(Verdict::Holds)
}

fn is_uniform(d: &super::Dist) -> bool {
    let mut it = d.iter().map(|(_, p)| p);
    match it.next() {
        None => true,
        Some(first) => it.all(|p| p == first),
    }
}

/// Per node, whether its noise is uniform over its support.
pub fn check_noise_uniform(s: &Scm) -> Vec<(usize, bool)> {
    (0..s.n()).map(|v| (v, is_uniform(s.noise_marginal(v)))).collect()
}

/// Model audit of the induced model against the causal graph, extended
/// with the SCM conditions and the guarantees that rest on them.
pub fn scm_audit(s: &Scm) -> Result<AuditReport, ScmError> {
    let g = s.graph();
    let j = s.induced_model()?;
    let base = audit(&j, g).map_err(|e| match e {
        LearnError::Model(m) => ScmError::Model(m),
        LearnError::Graph(g) => ScmError::Graph(g),
        other => ScmError::Format(other.to_string()),
    })?;
    let mut r = AuditReport::new("SCM audit");
    let label = |v: usize| g.label(v).to_string();
    let render_vals = |xs: &[Value]| xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");

    r.push(
        "positivity",
        check_positivity(s).map(|w| {
            format!(
                "P({}={}) > 0 and P({}={}) > 0 but jointly 0",
                g.render_set(w.a),
                render_vals(&w.x_a),
                g.render_set(w.b),
                render_vals(&w.x_b)
            )
        }),
    );
    let injective = check_noise_injective(s);
    r.push(
        "noise_injective",
        injective.clone().map(|w| {
            format!("node {} with parents ({}): noise {} and {} collide", label(w.node), render_vals(&w.parents), w.e1, w.e2)
        }),
    );
    r.push(
        "non_constant_fibers",
        check_non_constant_fibers(s).map(|w| format!("node {}, parent {}", label(w.node), label(w.parent))),
    );
    if injective.holds() {
        r.push(
            "noise_surjective",
            check_noise_surjective(s)?.map(|w| {
                format!("node {}, parent {}, other parents ({})", label(w.node), label(w.parent), render_vals(&w.others))
            }),
        );
    } else {
        r.notes.push("noise surjectivity is undefined without noise injectivity".into());
    }
    let uniform = check_noise_uniform(s);
    let skewed: Vec<String> = uniform.iter().filter(|u| !u.1).map(|u| label(u.0)).collect();
    r.push(
        "noise_uniform",
        if skewed.is_empty() { Verdict::Holds } else { Verdict::Fails(format!("not uniform at {}", skewed.join(","))) },
    );
    r.absorb(base);

    let f = |name: &str| r.flag(name).unwrap_or(false);
    let pos_fib = f("positivity") && f("non_constant_fibers");
    let stab = f("g0_maximal") && f("ordered_up") && f("ordered_down");
    let mut ledger = vec![
        LedgerEntry::new("scm_markov", Some(true), f("markovian")),
        LedgerEntry::new("scm_converse_pairwise", Some(pos_fib && (f("noise_injective") || g.is_dag())), f("converse_pairwise")),
        LedgerEntry::new(
            "scm_learner_equivalence",
            Some(pos_fib && stab && f("path_stable") && f("noise_injective")),
            f("learner_equivalent"),
        ),
    ];
    ledger.push(if g.is_dag() {
        LedgerEntry::new("scm_dag_learner_equivalence", Some(pos_fib && stab && f("v_stable")), f("dag_learner_equivalent"))
    } else {
        LedgerEntry::new("scm_dag_learner_equivalence", None, false)
    });
    let (met, observed) = uniform_noise_claim(s, &j, f("positivity"))?;
    ledger.push(LedgerEntry::new("uniform_noise", Some(met), observed));
    let mut all = ledger;
    all.extend(std::mem::take(&mut r.ledger));
    r.ledger = all;
    r.ledger.sort_by_key(|e| !e.claim.starts_with("scm_") as u8);
    Ok(r)
}

/// For an arrow `p -> v` whose mechanism is noise injective and surjective
/// under positivity, `<v, p | an(v, p)>` forces `ε_v` to be uniform with as
/// many values as `X_v`, and then `X_v` is uniform too. Returns whether any
/// arrow meets the hypotheses and whether all such arrows show the conclusion.
pub(crate) fn uniform_noise_claim(
    s: &Scm,
    j: &crate::imodel::IndependenceModel,
    positivity: bool,
) -> Result<(bool, bool), ScmError> {
    let g = s.graph();
    let joint = s.joint_distribution();
    let mut met = false;
    let mut observed = true;
    for v in 0..s.n() {
        if !positivity || injectivity_at(s, v).is_some() || surjectivity_at(s, v)?.is_some() {
            continue;
        }
        for p in g.parents(v) {
            if !j.pair(v, p, g.anc_pair(v, p)) {
                continue;
            }
            met = true;
            let noise = s.noise_marginal(v);
            let xv = joint.marginal(NodeSet::singleton(v));
            observed &= is_uniform(noise) && noise.len() == xv.len() && is_uniform(&xv);
        }
    }
    Ok((met, observed))
}

// SPDX-License-Identifier: MIT
//! Invariants of independence models, their properties and closures.

mod common;

use ancestral::graph::minimal_order;
use ancestral::imodel::{
    check_property, closure, is_faithful, is_markovian, is_minimally_markovian, parse_model, path_stable,
    skeleton_of_model, v_stable, write_model, PropertyId,
};
use ancestral::sample::{random_ancestral, random_scm, random_valid_order, rng, ScmSpec};
use ancestral::separation::{induced_model, ordered_local_markov_holds};
use ancestral::{IndependenceModel, DEFAULT_MAX_NODES};
use common::{config, graph_model_for, random_model, random_pair, thinned};
use proptest::prelude::*;
use rand::Rng;

/// V-stability straight from its definition: some nonadjacent pair of the
/// model skeleton with a common neighbour `k` and a set `C` such that both
/// `<i,j|C>` and `<i,j|C ∪ {k}>` hold.
fn v_unstable_oracle(j: &IndependenceModel) -> bool {
    let sk = skeleton_of_model(j);
    let n = j.n();
    for i in 0..n {
        for jj in i + 1..n {
            if sk.adjacent(i, jj) {
                continue;
            }
            for k in 0..n {
                if k == i || k == jj || !sk.adjacent(i, k) || !sk.adjacent(k, jj) {
                    continue;
                }
                let rest = j.all().without(i).without(jj).without(k);
                if rest.subsets().any(|c| j.pair(i, jj, c) && j.pair(i, jj, c.with(k))) {
                    return true;
                }
            }
        }
    }
    false
}

proptest! {
    #![proptest_config(config(60))]

    #[test]
    fn separation_models_have_all_nine_properties(seed in any::<u64>(), n in 1usize..=6) {
        let g = random_ancestral(&mut rng(seed), n, 0.5);
        let j = induced_model(&g).unwrap();
        let ord = minimal_order(&g).unwrap();
        for p in PropertyId::ALL {
            let v = check_property(&j, p, Some(&ord)).unwrap();
            prop_assert!(v.holds(), "{} fails on\n{}", p, g.to_text());
        }
    }
}

proptest! {
    #![proptest_config(config(200))]

    #[test]
    fn v_stability_is_the_shortest_path_case(seed in any::<u64>(), n in 2usize..=5) {
        let j = random_model(&mut rng(seed), n);
        let v = v_stable(&j);
        prop_assert_eq!(!v.holds(), v_unstable_oracle(&j));
        if let Some(w) = v.witness() {
            prop_assert!(j.pair(w.i, w.j, w.c) && j.pair(w.i, w.j, w.c.with(w.k)));
            // A V-configuration is a discriminating path with no inner nodes.
            prop_assert!(!path_stable(&j).holds());
        }
        if let Some(w) = path_stable(&j).witness() {
            if w.r() == 0 {
                prop_assert!(!v.holds());
            }
        }
    }

    #[test]
    fn singleton_transitivity_implies_v_stability(seed in any::<u64>(), n in 2usize..=5) {
        let j = random_model(&mut rng(seed), n);
        if check_property(&j, PropertyId::SingletonTransitivity, None).unwrap().holds() {
            prop_assert!(v_stable(&j).holds());
        }
    }

    #[test]
    fn faithful_then_minimal_then_markovian(seed in any::<u64>(), n in 1usize..=5) {
        let mut r = rng(seed);
        let j = random_model(&mut r, n);
        // Half the time test against the generating graph's class.
        let g = random_ancestral(&mut r, n, 0.5);
        let faithful = is_faithful(&j, &g).unwrap();
        let minimal = is_minimally_markovian(&j, &g).unwrap();
        let markov = is_markovian(&j, &g).unwrap().holds();
        prop_assert!(!faithful || minimal);
        prop_assert!(!minimal || markov);
        let own = induced_model(&g).unwrap();
        prop_assert!(is_faithful(&own, &g).unwrap());
    }

    #[test]
    fn closure_is_idempotent_and_extensive(seed in any::<u64>(), n in 2usize..=4, mask in 0u8..64) {
        let mut r = rng(seed);
        let mut j = IndependenceModel::numbered(n).unwrap();
        for _ in 0..r.gen_range(1..=4) {
            j.insert(random_pair(&mut r, n)).unwrap();
        }
        let pool = [
            PropertyId::Decomposition,
            PropertyId::WeakUnion,
            PropertyId::Contraction,
            PropertyId::Intersection,
            PropertyId::Composition,
            PropertyId::OrderedUpward,
        ];
        let rules: Vec<PropertyId> = pool.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, &p)| p).collect();
        let g = random_ancestral(&mut r, n, 0.5);
        let ord = random_valid_order(&mut r, &g);
        let once = closure(&j, &rules, Some(&ord)).unwrap();
        let twice = closure(&once, &rules, Some(&ord)).unwrap();
        prop_assert!(j.is_subset(&once));
        prop_assert!(once.same_statements(&twice));
        for &p in &rules {
            prop_assert!(check_property(&once, p, Some(&ord)).unwrap().holds(), "{p} not closed");
        }
    }

    #[test]
    fn mirrored_input_gives_identical_verdicts(seed in any::<u64>(), n in 2usize..=5) {
        let mut r = rng(seed);
        let g = random_ancestral(&mut r, n, 0.5);
        let mut raw = IndependenceModel::empty(g.labels().to_vec()).unwrap();
        let mut both = raw.clone();
        for _ in 0..r.gen_range(1..=6) {
            let t = random_pair(&mut r, n);
            raw.insert(t).unwrap();
            both.insert(t).unwrap();
            both.insert(t.swapped()).unwrap();
        }
        let ord = minimal_order(&g).unwrap();
        for p in PropertyId::ALL {
            prop_assert_eq!(
                check_property(&raw, p, Some(&ord)).unwrap(),
                check_property(&both, p, Some(&ord)).unwrap()
            );
        }
        prop_assert_eq!(v_stable(&raw), v_stable(&both));
        prop_assert_eq!(path_stable(&raw), path_stable(&both));
        prop_assert_eq!(is_markovian(&raw, &g).unwrap(), is_markovian(&both, &g).unwrap());
    }

    #[test]
    fn model_text_round_trips(seed in any::<u64>(), n in 1usize..=5) {
        let j = random_model(&mut rng(seed), n);
        let text = write_model(&j);
        let back = parse_model(&text, DEFAULT_MAX_NODES).unwrap().model;
        prop_assert!(back.same_statements(&j));
        prop_assert_eq!(write_model(&back), text);
    }

    // The equivalence is a statement about distributions; graph separation
    // models and SCM models both qualify, arbitrary semi-graphoids do not.
    #[test]
    fn ordered_local_markov_matches_global(seed in any::<u64>(), n in 1usize..=5) {
        let mut r = rng(seed);
        let g = random_ancestral(&mut r, n, 0.5);
        let j = graph_model_for(&mut r, &g);
        let ord = random_valid_order(&mut r, &g);
        prop_assert_eq!(
            ordered_local_markov_holds(&j, &g, &ord).unwrap().holds(),
            is_markovian(&j, &g).unwrap().holds(),
            "{}", g.to_text()
        );
    }

    #[test]
    fn ordered_local_markov_matches_global_for_scms(seed in any::<u64>(), n in 1usize..=4) {
        let mut r = rng(seed);
        let s = random_scm(&mut r, ScmSpec { n, ..ScmSpec::default() });
        let j = s.induced_model().unwrap();
        let g = if r.gen_bool(0.5) { thinned(&mut r, s.graph(), 0.3) } else { random_ancestral(&mut r, n, 0.5) };
        let ord = random_valid_order(&mut r, &g);
        prop_assert_eq!(
            ordered_local_markov_holds(&j, &g, &ord).unwrap().holds(),
            is_markovian(&j, &g).unwrap().holds(),
            "{}", g.to_text()
        );
    }
}

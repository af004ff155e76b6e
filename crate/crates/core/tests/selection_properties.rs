mod common;

use std::collections::BTreeSet;

use common::{close, Instance, Pair};
use crn_core::rng::{stream, Stream};
use crn_core::selection::{select_aoi, select_random, select_ucb, AoiWeights, UcbArms};
use crn_core::NodeId;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn instance(seed: u64, max_m: usize) -> Instance {
    Instance::random(&mut ChaCha8Rng::seed_from_u64(seed), max_m)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn aoi_matches_brute_force(seed in any::<u64>()) {
        let inst = instance(seed, 8);
        let chosen = inst.with_input(|i| select_aoi(i, &inst.weights)).unwrap();
        prop_assert_eq!(chosen.len(), inst.c);
        prop_assert!(close(inst.objective(&chosen), inst.brute_force_max()));
    }

    #[test]
    fn aoi_is_scale_invariant(seed in any::<u64>(), exp in -3i32..6) {
        let inst = instance(seed, 8);
        let c = 2f64.powi(exp);
        let mut scaled = inst.clone();
        scaled.weights = AoiWeights {
            alpha: inst.weights.alpha,
            beta: inst.weights.beta * c,
            gamma: inst.weights.gamma * c,
        };
        for row in &mut scaled.pairs {
            for p in row.iter_mut() {
                if let Pair::Sees(s) = p {
                    *s /= c;
                }
            }
        }
        let a = inst.with_input(|i| select_aoi(i, &inst.weights)).unwrap();
        let b = scaled.with_input(|i| select_aoi(i, &scaled.weights)).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn dominating_node_is_preferred(seed in any::<u64>(), u in 0usize..8, v in 0usize..8) {
        let mut inst = instance(seed, 8);
        let (u, v) = (u % inst.m, v % inst.m);
        prop_assume!(u != v && !inst.ages.is_empty());
        // u copies v, then turns one of v's blind spots into a sighting.
        inst.pairs[u] = inst.pairs[v].clone();
        let j = seed as usize % inst.ages.len();
        inst.pairs[v][j] = Pair::Cannot;
        inst.pairs[u][j] = Pair::Sees(0.5);
        for row in [u, v] {
            for p in inst.pairs[row].iter_mut() {
                if *p == Pair::Unknown {
                    *p = Pair::Cannot;
                }
            }
        }
        let (nu, nv) = (NodeId(u as u32 + 1), NodeId(v as u32 + 1));
        if inst.available.contains(&nv) {
            inst.available.insert(nu);
        } else {
            inst.available.remove(&nu);
        }
        let chosen = inst.with_input(|i| select_aoi(i, &inst.weights)).unwrap();
        prop_assert!(!chosen.contains(&nv) || chosen.contains(&nu));
    }

    #[test]
    fn ucb_takes_every_available_node(seed in any::<u64>(), rounds in 0usize..30) {
        let inst = instance(seed, 8);
        let mut arms = UcbArms::new(inst.m);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        for _ in 0..rounds {
            let k = inst.with_input(|i| select_ucb(&mut arms, i));
            for node in k {
                arms.record(node, rng.random_range(0.0..1.0));
            }
        }
        let k = inst.with_input(|i| select_ucb(&mut arms, i));
        prop_assert_eq!(k.len(), inst.c);
        if inst.available.len() <= inst.c {
            prop_assert!(inst.available.is_subset(&k));
        } else {
            prop_assert!(k.is_subset(&inst.available));
        }
    }

    #[test]
    fn random_selects_c_distinct_nodes(seed in any::<u64>()) {
        let inst = instance(seed, 8);
        let mut rng = stream(seed, Stream::Strategy);
        let k = inst.with_input(|i| select_random(i, &mut rng));
        prop_assert_eq!(k.len(), inst.c);
        prop_assert!(k.iter().all(|n| (1..=inst.m as u32).contains(&n.0)));
    }
}

#[test]
fn aoi_full_capacity_is_everyone() {
    let mut inst = instance(7, 8);
    inst.c = inst.m;
    let k = inst.with_input(|i| select_aoi(i, &inst.weights)).unwrap();
    assert_eq!(k, (1..=inst.m as u32).map(NodeId).collect::<BTreeSet<_>>());
}

use std::collections::{BTreeMap, BTreeSet};

use crn_core::fusion_center::{FusionCenter, PairKnowledge};
use crn_core::radar_node::{NodeReport, ReportEntry, ReportStatus};
use crn_core::{NodeId, SimParams, TargetId};
use nalgebra::Vector2;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn entry(id: u64, pos: Vector2<f64>, status: ReportStatus) -> ReportEntry {
    ReportEntry {
        target_id: TargetId(id),
        predicted_position: pos,
        predicted_velocity: pos * 0.01,
        variance: 0.5 + id as f64,
        status,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn identical_reports_fuse_exactly(x in -1e4f64..1e4, y in -1e4f64..1e4, n in 1u32..8) {
        let mut fc = FusionCenter::new(&SimParams::default());
        let pos = Vector2::new(x, y);
        let reports: Vec<NodeReport> = (1..=n)
            .map(|k| NodeReport { node_id: NodeId(k), cpi: 3, entries: vec![entry(0, pos, ReportStatus::New)] })
            .collect();
        let selected = (1..=n).map(NodeId).collect();
        fc.ingest(&reports, &selected, 0).unwrap();
        let t = &fc.tracks()[&TargetId(0)];
        prop_assert_eq!(t.fused_position, pos);
        prop_assert_eq!(t.fused_velocity, pos * 0.01);
    }

    /// Random selections over fixed node visibility: ages follow the
    /// refresh-or-increment recurrence and pair knowledge never flips.
    #[test]
    fn ages_and_knowledge_evolve_consistently(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (m, targets) = (rng.random_range(1..=6u32), rng.random_range(1..=12u64));
        let sees: BTreeMap<(u32, u64), bool> = (1..=m)
            .flat_map(|k| (0..targets).map(move |j| (k, j)))
            .map(|p| (p, rng.random_bool(0.4)))
            .collect();
        let mut alive: BTreeSet<u64> = (0..targets).collect();
        let mut fc = FusionCenter::new(&SimParams::default());
        let mut prev_ages: BTreeMap<TargetId, u32> = BTreeMap::new();
        let mut prev_pairs: BTreeMap<(NodeId, TargetId), PairKnowledge> = BTreeMap::new();

        for period in 0..60 {
            let dying: Vec<u64> = alive.iter().copied().filter(|_| rng.random_bool(0.03)).collect();
            let selected: BTreeSet<NodeId> = (1..=m).filter(|_| rng.random_bool(0.5)).map(NodeId).collect();
            let reports: Vec<NodeReport> = selected
                .iter()
                .map(|&k| {
                    let entries = alive
                        .iter()
                        .filter(|&&j| sees[&(k.0, j)])
                        .map(|&j| {
                            let status = if dying.contains(&j) { ReportStatus::Retired } else { ReportStatus::Active };
                            entry(j, Vector2::new(j as f64, period as f64), status)
                        })
                        .collect();
                    NodeReport { node_id: k, cpi: period, entries }
                })
                .collect();
            let outcome = fc.ingest(&reports, &selected, period).unwrap();
            for j in &outcome.retired {
                alive.remove(&j.0);
            }

            let ages = fc.ages();
            for (id, &age) in &ages {
                prop_assert!(age >= 1);
                if let Some(&before) = prev_ages.get(id) {
                    prop_assert!(age == 1 || age == before + 1, "{} -> {}", before, age);
                } else {
                    prop_assert_eq!(age, 1);
                }
            }
            for &(id, before) in &outcome.refreshed {
                prop_assert_eq!(Some(&before), prev_ages.get(&id));
            }

            for k in 1..=m {
                for &j in &alive {
                    let key = (NodeId(k), TargetId(j));
                    let now = fc.knowledge().pair(key.0, key.1);
                    if let Some(before) = prev_pairs.get(&key) {
                        let flipped = matches!(
                            (before, &now),
                            (PairKnowledge::Sees(_), PairKnowledge::CannotSee)
                                | (PairKnowledge::CannotSee, PairKnowledge::Sees(_))
                                | (PairKnowledge::Sees(_), PairKnowledge::Unknown)
                        );
                        prop_assert!(!flipped, "pair {:?}: {:?} -> {:?}", key, before, now);
                    }
                    prev_pairs.insert(key, now);
                }
            }
            prev_ages = ages;
        }
    }
}

#[test]
fn two_point_fusion() {
    let mut fc = FusionCenter::new(&SimParams::default());
    let reports = [
        NodeReport { node_id: NodeId(1), cpi: 1, entries: vec![entry(4, Vector2::new(1.0, 1.0), ReportStatus::New)] },
        NodeReport { node_id: NodeId(2), cpi: 1, entries: vec![entry(4, Vector2::new(3.0, 3.0), ReportStatus::New)] },
    ];
    fc.ingest(&reports, &[NodeId(1), NodeId(2)].into(), 0).unwrap();
    assert_eq!(fc.tracks()[&TargetId(4)].fused_position, Vector2::new(2.0, 2.0));
}

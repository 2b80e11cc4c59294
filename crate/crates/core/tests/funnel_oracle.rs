mod common;

use bundlepath::funnel::{shortest_path_corridor, string_pull, triangulate_subsequence, Corridor, Portal};
use bundlepath::instances::{seeded_sequences, InstanceParams};
use bundlepath::oracle::{dp_refined, dp_shortest, DiscretizedInstance};
use bundlepath::bundles::BundleSequence;
use bundlepath::{PolylinePath, Tolerances};
use common::{instance_with_segments, sampled_touring_length, sequence_touring_length};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn whole_corridor(seq: &BundleSequence) -> Corridor {
    triangulate_subsequence(seq, 0..seq.bundles.len(), seq.p(), &Tolerances::default()).unwrap()
}

#[test]
fn six_segment_corridors_match_both_oracles() {
    let tol = Tolerances::default();
    for seed in 0..10 {
        let seq = instance_with_segments(seed, 6);
        let c = whole_corridor(&seq);
        let funnel = shortest_path_corridor(&c, seq.p(), seq.q(), &tol).unwrap().length();
        let dp = dp_shortest(&DiscretizedInstance::from_sequence(&seq, 512)).unwrap().length();
        assert!((dp - funnel).abs() <= 0.005 * funnel, "seed {seed}: funnel {funnel} dp {dp}");
        assert!(dp >= funnel * (1.0 - 1e-12), "seed {seed}: dp {dp} below funnel {funnel}");
        let brute = sequence_touring_length(&seq, 401);
        assert!((brute - funnel).abs() <= 0.005 * funnel, "seed {seed}: funnel {funnel} brute {brute}");
    }
}

fn reversed(c: &Corridor) -> Vec<Portal> {
    c.shared_edges.iter().rev().map(|p| Portal::new(p.right, p.left)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn funnel_beats_sampled_polylines(seed in 0..100_000u64) {
        let tol = Tolerances::default();
        let seq = &seeded_sequences(seed, 1, &InstanceParams::default())[0];
        let c = whole_corridor(seq);
        let path = shortest_path_corridor(&c, seq.p(), seq.q(), &tol).unwrap();
        let best = path.length();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..100 {
            let pts = std::iter::once(seq.p())
                .chain(c.shared_edges.iter().map(|p| p.segment().at(rng.gen::<f64>())))
                .chain(std::iter::once(seq.q()));
            prop_assert!(best <= PolylinePath::new(pts).length() + 1e-9);
        }
    }

    #[test]
    fn funnel_path_is_taut_and_reversible(seed in 0..100_000u64) {
        let tol = Tolerances::default();
        let seq = &seeded_sequences(seed, 1, &InstanceParams::default())[0];
        let c = whole_corridor(seq);
        let path = shortest_path_corridor(&c, seq.p(), seq.q(), &tol).unwrap();
        let v = path.vertices();
        for w in &v[1..v.len() - 1] {
            let on_portal_end = c.shared_edges.iter().any(|p| p.left.approx_eq(*w, 1e-9) || p.right.approx_eq(*w, 1e-9));
            prop_assert!(on_portal_end, "bend at {:?} is not a portal endpoint", w);
        }
        let back = string_pull(seq.q(), &reversed(&c), seq.p(), &tol);
        let b = back.vertices();
        prop_assert_eq!(b.len(), v.len());
        for (x, y) in v.iter().zip(b.iter().rev()) {
            prop_assert!(x.approx_eq(*y, 1e-9), "{:?} vs {:?}", x, y);
        }
    }

    #[test]
    fn dp_is_monotone_in_nested_samples(seed in 0..100_000u64) {
        let seq = &seeded_sequences(seed, 1, &InstanceParams::default())[0];
        let mut last = f64::INFINITY;
        for k in 2..8 {
            let m = (1 << k) + 1;
            let len = dp_shortest(&DiscretizedInstance::from_sequence(seq, m)).unwrap().length();
            prop_assert!(len <= last + 1e-12, "m={} gave {} after {}", m, len, last);
            last = len;
        }
    }

    #[test]
    fn dp_visits_every_layer_in_order(seed in 0..100_000u64) {
        let seq = &seeded_sequences(seed, 1, &InstanceParams::default())[0];
        let inst = DiscretizedInstance::from_sequence(seq, 33);
        let path = dp_refined(&inst, 2).unwrap();
        // Walking the path, every segment is touched in order.
        let arcs = path.arc_lengths();
        let mut reached = 0.0;
        for s in &inst.segments {
            let hit = path
                .edges()
                .zip(arcs.iter())
                .filter_map(|(e, &start)| {
                    let x = (0..=64)
                        .map(|j| e.at(j as f64 / 64.0))
                        .find(|&x| s.distance_to(x) < 1e-9)?;
                    Some(start + e.a.dist(x))
                })
                .find(|&at| at >= reached - 1e-9);
            prop_assert!(hit.is_some(), "segment {:?} not visited in order", s);
            reached = hit.unwrap();
        }
        let brute = sampled_touring_length(&inst.segments, inst.src, inst.dst, 33);
        prop_assert!(path.length() <= brute + 1e-9);
    }
}

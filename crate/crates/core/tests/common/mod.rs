#![allow(dead_code)]

use bundlepath::bundles::BundleSequence;
use bundlepath::instances::{seeded_sequences, InstanceParams};
use bundlepath::{Point2, Segment};

/// Brute-force touring length: `m` evenly spaced samples per segment, layered DP in order.
/// Endpoints are always sampled, so paths pinned at a bundle vertex are found exactly.
pub fn sampled_touring_length(segments: &[Segment], p: Point2, q: Point2, m: usize) -> f64 {
    let mut prev: Vec<(Point2, f64)> = vec![(p, 0.0)];
    for s in segments {
        let layer: Vec<(Point2, f64)> = (0..m)
            .map(|k| {
                let x = s.at(k as f64 / (m - 1) as f64);
                let best = prev.iter().map(|&(y, d)| d + y.dist(x)).fold(f64::INFINITY, f64::min);
                (x, best)
            })
            .collect();
        prev = layer;
    }
    prev.iter().map(|&(y, d)| d + y.dist(q)).fold(f64::INFINITY, f64::min)
}

pub fn sequence_touring_length(seq: &BundleSequence, m: usize) -> f64 {
    sampled_touring_length(&seq.segments(), seq.p(), seq.q(), m)
}

/// First generated instance with exactly `segments` segments.
pub fn instance_with_segments(seed: u64, segments: usize) -> BundleSequence {
    let params = InstanceParams {
        min_bundles: 2,
        max_bundles: segments,
        max_segments: 3,
        ..InstanceParams::default()
    };
    (0..)
        .flat_map(|round| seeded_sequences(seed * 1_000 + round, 50, &params))
        .find(|s| s.segments().len() == segments)
        .expect("generator yields every size eventually")
}


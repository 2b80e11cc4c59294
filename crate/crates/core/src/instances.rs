//! Seeded random bundle sequences for benchmarks and cross-checks.
//!
//! The spine runs left to right through jittered vertices. Every bundle fans out into the minor
//! sector at its vertex and stays inside a disc of radius below half the smallest vertex
//! spacing, so bundles never meet each other.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bundles::{Bundle, BundleSequence};
use crate::funnel::is_regular_sleeve;
use crate::geometry::{ccw_angle, Point2, Tolerances};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InstanceParams {
    pub min_bundles: usize,
    pub max_bundles: usize,
    pub max_segments: usize,
    /// Horizontal distance between consecutive spine vertices.
    pub spacing: f64,
    /// Vertical jitter amplitude of spine vertices.
    pub jitter: f64,
}

impl Default for InstanceParams {
    fn default() -> Self {
        InstanceParams {
            min_bundles: 1,
            max_bundles: 12,
            max_segments: 4,
            spacing: 7.0,
            jitter: 5.0,
        }
    }
}

/// Draws until the sequence forms a regular sleeve (see [`is_regular_sleeve`]).
pub fn random_sequence<R: Rng>(rng: &mut R, params: &InstanceParams) -> BundleSequence {
    let tol = Tolerances::default();
    loop {
        let seq = draw(rng, params);
        if is_regular_sleeve(&seq, &tol).unwrap_or(false) {
            return seq;
        }
    }
}

fn draw<R: Rng>(rng: &mut R, params: &InstanceParams) -> BundleSequence {
    let n = rng.gen_range(params.min_bundles..=params.max_bundles);
    let spine: Vec<Point2> = (0..n + 2)
        .map(|i| Point2::new(i as f64 * params.spacing, rng.gen_range(-params.jitter..=params.jitter)))
        .collect();
    let mut min_gap = f64::INFINITY;
    for i in 0..spine.len() {
        for j in i + 1..spine.len() {
            min_gap = min_gap.min(spine[i].dist(spine[j]));
        }
    }
    let reach = 0.45 * min_gap;
    let interior = (1..=n)
        .map(|i| {
            let (prev, a, next) = (spine[i - 1], spine[i], spine[i + 1]);
            let d1 = prev - a;
            let theta = ccw_angle(d1, next - a);
            // Sweep from the incoming ray towards the outgoing one through the minor sector.
            let (sector, sign) = if theta <= std::f64::consts::PI {
                (theta, 1.0)
            } else {
                (std::f64::consts::TAU - theta, -1.0)
            };
            let count = rng.gen_range(1..=params.max_segments);
            let mut offsets: Vec<f64> = (0..count).map(|_| rng.gen_range(0.05..0.95) * sector).collect();
            offsets.sort_by(f64::total_cmp);
            offsets.dedup_by(|x, y| (*x - *y).abs() < 1e-3);
            let base = d1.angle();
            let ends = offsets
                .into_iter()
                .map(|o| a + Point2::from_polar(rng.gen_range(0.3..1.0) * reach, base + sign * o));
            Bundle::from_endpoints(a, ends)
        })
        .collect();
    BundleSequence::new(spine[0], interior, spine[n + 1])
}

/// `count` instances from a ChaCha stream seeded with `seed`.
pub fn seeded_sequences(seed: u64, count: usize, params: &InstanceParams) -> Vec<BundleSequence> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_sequence(&mut rng, params)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundles::bundles_intersect;

    #[test]
    fn generated_instances_are_valid_and_disjoint() {
        let tol = Tolerances::default();
        for seq in seeded_sequences(7, 50, &InstanceParams::default()) {
            seq.validate(&tol).unwrap();
            assert!(seq.diameter() <= 100.0);
            for i in 1..seq.bundles.len() {
                for j in i + 1..seq.bundles.len() {
                    assert!(!bundles_intersect(&seq.bundles[i], &seq.bundles[j], &tol));
                }
            }
        }
    }

    #[test]
    fn same_seed_same_instances() {
        let p = InstanceParams::default();
        assert_eq!(seeded_sequences(3, 5, &p), seeded_sequences(3, 5, &p));
    }
}

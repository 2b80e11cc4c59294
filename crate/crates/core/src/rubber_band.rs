//! Rubber-band baseline over pairwise disjoint segments.
//!
//! Bundles share their vertex, so each segment is first shortened by a tiny amount at the
//! vertex end. Then one point per segment is relaxed in turn to the spot minimizing the
//! distance to its two neighbours, until no point moves any more.

use thiserror::Error;

use crate::bundles::BundleSequence;
use crate::geometry::{segment_intersection, Point2, PolylinePath, Segment, Tolerances};
use crate::mms::{ConvergedBy, MmsReport, SolveLimits};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RubberBandError {
    #[error("trim length {epsilon} is not below segment length {length}")]
    EpsilonTooLarge { epsilon: f64, length: f64 },
    #[error("segments {0} and {1} still meet after trimming")]
    StillIntersecting(usize, usize),
}

/// Relative trim used when the caller does not pick one.
pub const DEFAULT_TRIM: f64 = 1e-6;

/// Shortens every bundle segment by `epsilon` at its vertex end, in traversal order. Far ends
/// that touch another segment's far end are pulled back by `epsilon` as well.
pub fn trim_bundles(seq: &BundleSequence, epsilon: f64, tol: &Tolerances) -> Result<Vec<Segment>, RubberBandError> {
    let segs = seq.segments();
    let mut out = Vec::with_capacity(segs.len());
    for s in &segs {
        let length = s.length();
        if !(epsilon > 0.0) || 2.0 * epsilon >= length {
            return Err(RubberBandError::EpsilonTooLarge { epsilon, length });
        }
        let d = (s.b - s.a) * (1.0 / length);
        out.push(Segment::new(s.a + d * epsilon, s.b));
    }
    let eps = tol.eps_geom;
    let touching: Vec<usize> = (0..out.len())
        .filter(|&i| (0..out.len()).any(|j| j != i && out[j].b.approx_eq(out[i].b, eps)))
        .collect();
    for i in touching {
        let s = out[i];
        out[i] = Segment::new(s.a, s.b + (s.a - s.b) * (epsilon / s.length()));
    }
    for i in 0..out.len() {
        for j in i + 1..out.len() {
            if !segment_intersection(out[i], out[j], tol).is_empty() {
                return Err(RubberBandError::StillIntersecting(i, j));
            }
        }
    }
    Ok(out)
}

/// Point of `s` minimizing `|a x| + |x b|`.
fn best_on_segment(s: &Segment, a: Point2, b: Point2) -> Point2 {
    let d = s.b - s.a;
    let len2 = d.dot(d);
    if len2 == 0.0 {
        return s.a;
    }
    let ta = (a - s.a).dot(d) / len2;
    let tb = (b - s.a).dot(d) / len2;
    let ha = d.cross(a - s.a).abs();
    let hb = d.cross(b - s.a).abs();
    // Crossing of the line with a -> b, or with a -> mirror(b) when both sit on one side.
    let t = if ha + hb == 0.0 { 0.5 * (ta + tb) } else { (ta * hb + tb * ha) / (ha + hb) };
    s.at(t.clamp(0.0, 1.0))
}

fn path_of(p: Point2, xs: &[Point2], q: Point2) -> PolylinePath {
    let mut v = Vec::with_capacity(xs.len() + 2);
    v.push(p);
    v.extend_from_slice(xs);
    v.push(q);
    PolylinePath::with_eps(v, 0.0)
}

pub fn rubber_band_solve(segments: &[Segment], p: Point2, q: Point2, limits: &SolveLimits) -> MmsReport {
    let mut xs: Vec<Point2> = segments.iter().map(|s| s.at(0.5)).collect();
    let mut diameter = p.dist(q);
    for s in segments {
        diameter = diameter.max(p.dist(s.a)).max(p.dist(s.b));
    }
    let stop = limits.tol_len * diameter.max(1.0);
    let mut lengths = vec![path_of(p, &xs, q).length()];
    let mut converged_by = ConvergedBy::MaxIterations;
    let mut iterations = 0;
    for _ in 0..limits.max_iter {
        iterations += 1;
        let mut max_move = 0.0f64;
        for i in 0..segments.len() {
            let a = if i == 0 { p } else { xs[i - 1] };
            let b = if i + 1 == segments.len() { q } else { xs[i + 1] };
            let x = best_on_segment(&segments[i], a, b);
            max_move = max_move.max(x.dist(xs[i]));
            xs[i] = x;
        }
        lengths.push(path_of(p, &xs, q).length());
        if max_move < stop {
            converged_by = ConvergedBy::LengthTolerance;
            break;
        }
    }
    let mut all = vec![p];
    all.extend_from_slice(&xs);
    all.push(q);
    let degenerate = all.windows(2).any(|w| w[0].approx_eq(w[1], limits.eps_geom));
    MmsReport {
        path: PolylinePath::with_eps(all, limits.eps_geom),
        iterations,
        converged_by,
        per_iteration_lengths: lengths,
        fallback_used: false,
        degenerate,
        audit: Vec::new(),
        final_state: None,
    }
}

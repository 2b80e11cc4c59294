//! Brute-force reference solver: sample every segment, then run a layered dynamic program for
//! the shortest polyline that visits one sample per segment in order.

use thiserror::Error;

use crate::bundles::BundleSequence;
use crate::geometry::{Point2, PolylinePath, Segment};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("layer {0} has no sample points")]
    EmptyLayer(usize),
}

pub const DEFAULT_SAMPLES: usize = 513;

#[derive(Debug, Clone, PartialEq)]
pub struct DiscretizedInstance {
    pub layers: Vec<Vec<Point2>>,
    /// Segment each layer was sampled from; used by the refinement pass.
    pub segments: Vec<Segment>,
    pub src: Point2,
    pub dst: Point2,
}

impl DiscretizedInstance {
    /// `m` evenly spaced samples per segment, endpoints included. With `m = 2^k + 1` the
    /// sample sets for increasing `k` are nested.
    pub fn from_segments(segments: &[Segment], src: Point2, dst: Point2, m: usize) -> Self {
        let m = m.max(2);
        let layers = segments
            .iter()
            .map(|s| (0..m).map(|j| s.at(j as f64 / (m - 1) as f64)).collect())
            .collect();
        DiscretizedInstance {
            layers,
            segments: segments.to_vec(),
            src,
            dst,
        }
    }

    /// Every bundle segment in traversal order.
    pub fn from_sequence(seq: &BundleSequence, m: usize) -> Self {
        Self::from_segments(&seq.segments(), seq.p(), seq.q(), m)
    }
}

/// Exact minimum over the sampled product space.
pub fn dp_shortest(inst: &DiscretizedInstance) -> Result<PolylinePath, OracleError> {
    dp_points(inst).map(|pts| PolylinePath::with_eps(pts, 0.0))
}

/// Visited points `src, x_1 .. x_n, dst` of the DP optimum.
fn dp_points(inst: &DiscretizedInstance) -> Result<Vec<Point2>, OracleError> {
    if let Some(i) = inst.layers.iter().position(Vec::is_empty) {
        return Err(OracleError::EmptyLayer(i));
    }
    let mut cost: Vec<f64> = vec![0.0];
    let mut prev_pts: &[Point2] = std::slice::from_ref(&inst.src);
    let mut back: Vec<Vec<usize>> = Vec::with_capacity(inst.layers.len() + 1);
    let dst = [inst.dst];
    for layer in inst.layers.iter().map(Vec::as_slice).chain(std::iter::once(&dst[..])) {
        let mut next = vec![f64::INFINITY; layer.len()];
        let mut arg = vec![0usize; layer.len()];
        for (j, &x) in layer.iter().enumerate() {
            for (i, &y) in prev_pts.iter().enumerate() {
                let c = cost[i] + x.dist(y);
                if c < next[j] {
                    next[j] = c;
                    arg[j] = i;
                }
            }
        }
        back.push(arg);
        cost = next;
        prev_pts = layer;
    }
    let mut pts = Vec::with_capacity(inst.layers.len() + 2);
    pts.push(inst.dst);
    let mut idx = back.last().map_or(0, |b| b[0]);
    for l in (0..inst.layers.len()).rev() {
        pts.push(inst.layers[l][idx]);
        idx = back[l][idx];
    }
    pts.push(inst.src);
    pts.reverse();
    Ok(pts)
}

/// DP followed by `passes` rounds of golden-section search on each visited point, holding its
/// neighbours fixed.
pub fn dp_refined(inst: &DiscretizedInstance, passes: usize) -> Result<PolylinePath, OracleError> {
    let v = dp_points(inst)?;
    let coarse = PolylinePath::with_eps(v.clone(), 0.0);
    let n = inst.segments.len();
    let mut params: Vec<f64> = Vec::with_capacity(n);
    for (l, s) in inst.segments.iter().enumerate() {
        params.push(s.project_param(v[l + 1]));
    }
    let point = |params: &[f64], l: usize| -> Point2 {
        if l == 0 {
            inst.src
        } else if l == n + 1 {
            inst.dst
        } else {
            inst.segments[l - 1].at(params[l - 1])
        }
    };
    for _ in 0..passes {
        for l in 0..n {
            let a = point(&params, l);
            let b = point(&params, l + 2);
            let s = inst.segments[l];
            params[l] = golden_min(|t| a.dist(s.at(t)) + s.at(t).dist(b), 0.0, 1.0, 1e-12);
        }
    }
    let pts: Vec<Point2> = (0..n + 2).map(|l| point(&params, l)).collect();
    let refined = PolylinePath::with_eps(pts, 0.0);
    Ok(if refined.length() <= coarse.length() { refined } else { coarse })
}

fn golden_min(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        }
    }
    let mid = (lo + hi) / 2.0;
    [(f(0.0), 0.0), (f(1.0), 1.0), (f(mid), mid)]
        .into_iter()
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .unwrap()
        .1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::pt;

    #[test]
    fn no_layers_is_straight() {
        let inst = DiscretizedInstance::from_segments(&[], pt(0., 0.), pt(3., 4.), 513);
        let p = dp_shortest(&inst).unwrap();
        assert_eq!(p.vertices(), &[pt(0., 0.), pt(3., 4.)]);
    }

    #[test]
    fn forced_endpoint() {
        let s = Segment::new(pt(2., 1.), pt(2., 2.));
        let inst = DiscretizedInstance::from_segments(&[s], pt(0., 0.), pt(4., 0.), 512);
        let p = dp_shortest(&inst).unwrap();
        assert!((p.length() - 2.0 * 5f64.sqrt()).abs() < 1e-4);
    }

    #[test]
    fn empty_layer_rejected() {
        let inst = DiscretizedInstance {
            layers: vec![vec![pt(1., 1.)], vec![]],
            segments: vec![],
            src: pt(0., 0.),
            dst: pt(1., 0.),
        };
        assert_eq!(dp_shortest(&inst), Err(OracleError::EmptyLayer(1)));
    }

    #[test]
    fn refinement_reaches_interior_optimum() {
        // Best crossing of the diagonal segment is off every coarse sample.
        let s = Segment::new(pt(1., -1.), pt(1.3, 2.));
        let inst = DiscretizedInstance::from_segments(&[s], pt(0., 0.), pt(3., 0.), 5);
        let coarse = dp_shortest(&inst).unwrap().length();
        let fine = dp_refined(&inst, 3).unwrap().length();
        assert!(fine <= coarse);
        assert!((fine - 3.0).abs() < 1e-9);
    }
}

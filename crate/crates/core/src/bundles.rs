//! Bundles of segments, bundle sequences, cutting segments and partitions.

use std::f64::consts::{PI, TAU};
use std::ops::Range;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{
    ccw_angle, segment_intersection, side_of_polyline, GeometryError, Orientation, Point2,
    PolylinePath, Segment, SegmentIntersection, Tolerances,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BundleError {
    #[error("bundle at {0} has no segments")]
    Degenerate(Point2),
    #[error("bundle at {0}: previous, vertex and next are collinear and the segments straddle the line")]
    AmbiguousRotation(Point2),
    #[error("bundle at {0} has segments on both sides of the spine")]
    MixedSides(Point2),
    #[error("segment of bundle at {vertex} does not start at the vertex")]
    DetachedSegment { vertex: Point2 },
    #[error("partition count {k} outside [1, {n}]")]
    BadK { k: usize, n: usize },
    #[error("invalid partition sizes: {0}")]
    BadSizes(String),
    #[error("sequence needs degenerate endpoints and at least one interior bundle")]
    BadSequence,
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// A fan of segments `[vertex, b_j]`. An empty fan is a degenerate bundle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bundle {
    pub vertex: Point2,
    pub segments: Vec<Segment>,
    /// Angle of the vision-disc sector holding the bundle.
    pub sector_angle: f64,
}

impl Bundle {
    pub fn point(vertex: Point2) -> Self {
        Bundle {
            vertex,
            segments: Vec::new(),
            sector_angle: PI,
        }
    }

    /// Bundle from far endpoints.
    pub fn from_endpoints(vertex: Point2, ends: impl IntoIterator<Item = Point2>) -> Self {
        Bundle {
            vertex,
            segments: ends.into_iter().map(|b| Segment::new(vertex, b)).collect(),
            sector_angle: PI,
        }
    }

    pub fn is_degenerate(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn last_segment(&self) -> Option<Segment> {
        self.segments.last().copied()
    }
}

/// Ordered bundles `a_0 .. a_{N+1}` with `a_0 = p`, `a_{N+1} = q` and the spine `tau` through their vertices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BundleSequence {
    pub bundles: Vec<Bundle>,
    pub tau: PolylinePath,
}

impl BundleSequence {
    pub fn new(p: Point2, interior: Vec<Bundle>, q: Point2) -> Self {
        let mut bundles = Vec::with_capacity(interior.len() + 2);
        bundles.push(Bundle::point(p));
        bundles.extend(interior);
        bundles.push(Bundle::point(q));
        Self::from_bundles(bundles)
    }

    pub fn from_bundles(bundles: Vec<Bundle>) -> Self {
        let tau = PolylinePath::with_eps(bundles.iter().map(|b| b.vertex), 0.0);
        BundleSequence { bundles, tau }
    }

    pub fn p(&self) -> Point2 {
        self.bundles[0].vertex
    }

    pub fn q(&self) -> Point2 {
        self.bundles[self.bundles.len() - 1].vertex
    }

    /// Number of interior bundles `N`.
    pub fn interior_count(&self) -> usize {
        self.bundles.len().saturating_sub(2)
    }

    /// All segments in traversal order.
    pub fn segments(&self) -> Vec<Segment> {
        self.bundles
            .iter()
            .flat_map(|b| b.segments.iter().copied())
            .collect()
    }

    /// Largest distance between any two defining points.
    pub fn diameter(&self) -> f64 {
        let pts: Vec<Point2> = self
            .bundles
            .iter()
            .flat_map(|b| std::iter::once(b.vertex).chain(b.segments.iter().map(|s| s.b)))
            .collect();
        let mut d: f64 = 0.0;
        for i in 0..pts.len() {
            for j in (i + 1)..pts.len() {
                d = d.max(pts[i].dist(pts[j]));
            }
        }
        d
    }

    /// Side of `x` relative to the spine, decided locally at bundle `i`'s vertex.
    pub fn side_at(&self, i: usize, x: Point2, tol: &Tolerances) -> Result<Orientation, GeometryError> {
        side_near_vertex(&self.tau, self.bundles[i].vertex, i, x, tol)
    }

    /// Checks the structural invariants.
    pub fn validate(&self, tol: &Tolerances) -> Result<(), BundleError> {
        if self.bundles.len() < 3
            || !self.bundles[0].is_degenerate()
            || !self.bundles[self.bundles.len() - 1].is_degenerate()
        {
            return Err(BundleError::BadSequence);
        }
        for (i, b) in self.bundles.iter().enumerate() {
            for s in &b.segments {
                if !s.a.approx_eq(b.vertex, tol.eps_geom) {
                    return Err(BundleError::DetachedSegment { vertex: b.vertex });
                }
            }
            if !b.is_degenerate() && self.bundle_side(i, tol)?.is_none() {
                return Err(BundleError::MixedSides(b.vertex));
            }
        }
        Ok(())
    }

    /// Common side of a bundle's far endpoints; `Some(Collinear)` when all lie on the spine,
    /// `None` when they straddle it.
    pub fn bundle_side(&self, i: usize, tol: &Tolerances) -> Result<Option<Orientation>, GeometryError> {
        let mut side = Orientation::Collinear;
        for s in &self.bundles[i].segments {
            match self.side_at(i, s.b, tol)? {
                Orientation::Collinear => {}
                o if side == Orientation::Collinear => side = o,
                o if o != side => return Ok(None),
                _ => {}
            }
        }
        Ok(Some(side))
    }
}

/// `side_of_polyline`, but decided by the wedge at vertex `vi` of `tau` when `x`
/// is closer to that vertex than to any non-adjacent edge.
fn side_near_vertex(
    tau: &PolylinePath,
    vertex: Point2,
    vi: usize,
    x: Point2,
    tol: &Tolerances,
) -> Result<Orientation, GeometryError> {
    let verts = tau.vertices();
    if vi == 0 || vi + 1 >= verts.len() || !verts[vi].approx_eq(vertex, tol.eps_geom) {
        return side_of_polyline(tau, x, tol);
    }
    let local = PolylinePath::with_eps([verts[vi - 1], verts[vi], verts[vi + 1]], tol.eps_geom);
    if local.len() < 3 {
        return side_of_polyline(tau, x, tol);
    }
    side_of_polyline(&local, x, tol)
}

/// Cutting segment `[u, v]`; `v` is the endpoint strictly right of the spine, or the bundle vertex.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CuttingSegment {
    pub u: Point2,
    pub v: Point2,
    /// Index of the bundle this segment belongs to.
    pub source: usize,
}

impl CuttingSegment {
    pub fn singleton(p: Point2, source: usize) -> Self {
        CuttingSegment { u: p, v: p, source }
    }

    pub fn segment(&self) -> Segment {
        Segment::new(self.u, self.v)
    }

    pub fn is_singleton(&self, eps: f64) -> bool {
        self.u.approx_eq(self.v, eps)
    }
}

/// Orients a segment of the bundle at `bundle_vertex`.
pub fn orient_cutting_segment(
    seg: Segment,
    bundle_vertex: Point2,
    tau: &PolylinePath,
    tol: &Tolerances,
) -> Result<CuttingSegment, GeometryError> {
    if seg.is_degenerate(tol.eps_geom) {
        return Ok(CuttingSegment::singleton(seg.a, 0));
    }
    let vi = tau
        .vertices()
        .iter()
        .position(|v| v.approx_eq(bundle_vertex, tol.eps_geom))
        .unwrap_or(usize::MAX);
    let far = if seg.a.approx_eq(bundle_vertex, tol.eps_geom) {
        seg.b
    } else {
        seg.a
    };
    let side = if vi == usize::MAX {
        side_of_polyline(tau, far, tol)?
    } else {
        side_near_vertex(tau, bundle_vertex, vi, far, tol)?
    };
    let source = if vi == usize::MAX { 0 } else { vi };
    Ok(if side == Orientation::Right {
        CuttingSegment {
            u: bundle_vertex,
            v: far,
            source,
        }
    } else {
        CuttingSegment {
            u: far,
            v: bundle_vertex,
            source,
        }
    })
}

/// Sorts the bundle's segments by the angle swept from `vertex -> prev` towards `vertex -> next`
/// through the region holding the bundle.
pub fn order_bundle_segments(
    b: &Bundle,
    prev_vertex: Point2,
    next_vertex: Point2,
    tol: &Tolerances,
) -> Result<Bundle, BundleError> {
    if b.is_degenerate() {
        return Err(BundleError::Degenerate(b.vertex));
    }
    let to_prev = prev_vertex - b.vertex;
    let to_next = next_vertex - b.vertex;
    let span = ccw_angle(to_prev, to_next);
    let band = tol.tol_angle;

    let angles: Vec<f64> = b
        .segments
        .iter()
        .map(|s| {
            let a = ccw_angle(to_prev, s.b - b.vertex);
            if TAU - a <= band {
                0.0
            } else {
                a
            }
        })
        .collect();
    let in_ccw = angles.iter().any(|&a| a > band && a < span - band);
    let in_cw = angles.iter().any(|&a| a > span + band);

    let clockwise = match (in_ccw, in_cw) {
        (true, true) => {
            return Err(if (span - PI).abs() <= band {
                BundleError::AmbiguousRotation(b.vertex)
            } else {
                BundleError::MixedSides(b.vertex)
            });
        }
        (true, false) => false,
        (false, true) => true,
        // Only boundary directions: sweep through the minor sector.
        (false, false) => span > PI,
    };

    let mut keyed: Vec<(f64, f64, Segment)> = b
        .segments
        .iter()
        .zip(&angles)
        .map(|(s, &a)| {
            let key = if clockwise { (TAU - a) % TAU } else { a };
            (key, s.length(), *s)
        })
        .collect();
    keyed.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1)));
    Ok(Bundle {
        vertex: b.vertex,
        segments: keyed.into_iter().map(|(_, _, s)| s).collect(),
        sector_angle: b.sector_angle,
    })
}

/// Orders every interior bundle of the sequence in place.
pub fn order_sequence(seq: &BundleSequence, tol: &Tolerances) -> Result<BundleSequence, BundleError> {
    let mut bundles = seq.bundles.clone();
    for i in 1..bundles.len().saturating_sub(1) {
        if bundles[i].is_degenerate() {
            continue;
        }
        bundles[i] = order_bundle_segments(
            &bundles[i],
            seq.bundles[i - 1].vertex,
            seq.bundles[i + 1].vertex,
            tol,
        )?;
    }
    Ok(BundleSequence {
        bundles,
        tau: seq.tau.clone(),
    })
}

/// Unit bisector of the minor sector at `vertex` between the directions to `prev` and `next`,
/// together with that sector's angle. A straight-through vertex resolves to the left of travel.
pub fn minor_sector_bisector(prev: Point2, vertex: Point2, next: Point2, tol: &Tolerances) -> (Point2, f64) {
    let to_prev = prev - vertex;
    let to_next = next - vertex;
    let span = ccw_angle(to_prev, to_next);
    let base = to_prev.angle();
    if (span - PI).abs() <= tol.tol_angle {
        let travel = next - prev;
        let left = Point2::new(-travel.y, travel.x);
        let n = left.norm();
        return (left * (1.0 / n), PI);
    }
    if span < PI {
        (Point2::from_polar(1.0, base + span / 2.0), span)
    } else {
        let minor = TAU - span;
        (Point2::from_polar(1.0, base - minor / 2.0), minor)
    }
}

/// Gives every degenerate interior bundle one segment of length `r` along its minor-sector bisector.
pub fn insert_fake_segments(seq: &BundleSequence, r: f64, tol: &Tolerances) -> BundleSequence {
    let mut bundles = seq.bundles.clone();
    let n = bundles.len();
    for i in 1..n.saturating_sub(1) {
        if !bundles[i].is_degenerate() {
            continue;
        }
        let (dir, angle) = minor_sector_bisector(
            seq.bundles[i - 1].vertex,
            seq.bundles[i].vertex,
            seq.bundles[i + 1].vertex,
            tol,
        );
        let v = bundles[i].vertex;
        bundles[i].segments.push(Segment::new(v, v + dir * r));
        bundles[i].sector_angle = angle;
    }
    BundleSequence {
        bundles,
        tau: seq.tau.clone(),
    }
}

/// True iff some segment of `b1` and some segment of `b2` share a point that is not an endpoint of both.
pub fn bundles_intersect(b1: &Bundle, b2: &Bundle, tol: &Tolerances) -> bool {
    let eps = tol.eps_geom;
    let is_end = |s: &Segment, p: Point2| s.a.approx_eq(p, eps) || s.b.approx_eq(p, eps);
    for s1 in &b1.segments {
        for s2 in &b2.segments {
            match segment_intersection(*s1, *s2, tol) {
                SegmentIntersection::Empty => {}
                SegmentIntersection::Point(x) => {
                    if !(is_end(s1, x) && is_end(s2, x)) {
                        return true;
                    }
                }
                SegmentIntersection::Overlap(_) => return true,
            }
        }
    }
    false
}

/// Result of splitting a sequence into sub-sequences.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    /// Bundle index ranges of `F_0 .. F_K`; contiguous and covering `0..N+2`.
    pub groups: Vec<Range<usize>>,
    /// Cutting segments `xi_0 .. xi_{K+1}`.
    pub cuts: Vec<CuttingSegment>,
}

impl Partition {
    pub fn k(&self) -> usize {
        self.groups.len() - 1
    }
}

/// Balanced split: the `N` interior bundles go into `K + 1` runs whose sizes differ by at most one,
/// larger runs first. `F_0` also holds `p` and `F_K` holds `q`.
pub fn partition(seq: &BundleSequence, k: usize, tol: &Tolerances) -> Result<Partition, BundleError> {
    let n = seq.interior_count();
    if k < 1 || k > n {
        return Err(BundleError::BadK { k, n });
    }
    let base = n / (k + 1);
    let extra = n % (k + 1);
    let sizes: Vec<usize> = (0..=k).map(|i| base + usize::from(i < extra)).collect();
    partition_with_sizes(seq, &sizes, tol)
}

/// Split with explicit interior run sizes (one per sub-sequence, `K + 1` entries).
/// Every run but the last must be non-empty since it supplies a cutting segment.
pub fn partition_with_sizes(
    seq: &BundleSequence,
    sizes: &[usize],
    tol: &Tolerances,
) -> Result<Partition, BundleError> {
    let n = seq.interior_count();
    if sizes.len() < 2 {
        return Err(BundleError::BadSizes("need at least two runs".into()));
    }
    if sizes.iter().sum::<usize>() != n {
        return Err(BundleError::BadSizes(format!("sizes sum to {}, expected {n}", sizes.iter().sum::<usize>())));
    }
    if sizes[..sizes.len() - 1].contains(&0) {
        return Err(BundleError::BadSizes("only the last run may be empty".into()));
    }
    let last = seq.bundles.len() - 1;
    let mut groups = Vec::with_capacity(sizes.len());
    let mut cuts = vec![CuttingSegment::singleton(seq.p(), 0)];
    let mut start = 0usize;
    let mut end_interior = 0usize;
    for (gi, &s) in sizes.iter().enumerate() {
        end_interior += s;
        let is_last = gi + 1 == sizes.len();
        let end = if is_last { last + 1 } else { end_interior + 1 };
        groups.push(start..end);
        if !is_last {
            let bi = end_interior;
            let bundle = &seq.bundles[bi];
            let seg = bundle.last_segment().ok_or(BundleError::Degenerate(bundle.vertex))?;
            let mut cut = orient_cutting_segment(seg, bundle.vertex, &seq.tau, tol)?;
            cut.source = bi;
            cuts.push(cut);
        }
        start = end;
    }
    cuts.push(CuttingSegment::singleton(seq.q(), last));
    Ok(Partition { groups, cuts })
}

//! Corridors of adjacent triangles built from bundle sub-sequences, and the
//! funnel sweep that extracts the taut shortest path through them.
//!
//! A corridor is described by its ordered *portals*: the shared edges that a
//! path has to pass in order. Each portal is stored as `(left, right)` as seen
//! by a traveller heading from `p` towards `q`, which for a bundle segment is
//! exactly `(u, v)` of its cutting-segment orientation.

use std::ops::Range;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bundles::{Bundle, BundleSequence};
use crate::geometry::{
    cross3, orient, segment_intersection, GeometryError, Orientation, Point2, PolylinePath,
    Segment, SegmentIntersection, Tolerances,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FunnelError {
    #[error("corridor triangles overlap near {0}")]
    NonSimpleCorridor(Point2),
    #[error("point {0} lies outside the corridor end triangles")]
    PointOutsideCorridor(Point2),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Portal {
    pub left: Point2,
    pub right: Point2,
}

impl Portal {
    pub fn new(left: Point2, right: Point2) -> Self {
        Portal { left, right }
    }

    pub fn segment(&self) -> Segment {
        Segment::new(self.left, self.right)
    }

    /// `x` lies strictly beyond the portal's line in the travel direction.
    fn is_ahead(&self, x: Point2, tol: &Tolerances) -> bool {
        orient(self.right, self.left, x, tol) == Orientation::Right
    }

    fn shares_endpoint(&self, o: &Portal, eps: f64) -> bool {
        self.left.approx_eq(o.left, eps) || self.right.approx_eq(o.right, eps)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PortalKind {
    /// Segment `index` of bundle `bundle`.
    Segment { bundle: usize, index: usize },
    /// Diagonal of the quadrilateral between two consecutive bundles.
    Diagonal { after_bundle: usize },
}

/// Ordered list of adjacent triangles and the edges shared between them.
#[derive(Debug, Clone, PartialEq)]
pub struct Corridor {
    pub triangles: Vec<[Point2; 3]>,
    pub shared_edges: Vec<Portal>,
    /// Final edge of the last triangle (the exit cutting segment), when there is one.
    pub exit: Option<Portal>,
}

impl Corridor {
    /// Corridor entered at `entry`, passing `portals`, ending with `exit` or at `end` when there is no exit edge.
    pub fn from_portals(entry: Point2, portals: &[Portal], exit: Option<Portal>, end: Option<Point2>) -> Self {
        let mut all: Vec<Portal> = portals.to_vec();
        if let Some(e) = exit {
            all.push(e);
        }
        let mut triangles = Vec::new();
        if let Some(first) = all.first() {
            triangles.push([entry, first.left, first.right]);
        }
        for w in all.windows(2) {
            let (a, b) = (w[0], w[1]);
            let eps = 0.0;
            if a.left.approx_eq(b.left, eps) {
                triangles.push([a.left, a.right, b.right]);
            } else if a.right.approx_eq(b.right, eps) {
                triangles.push([a.right, b.left, a.left]);
            } else {
                triangles.push([a.left, a.right, b.right]);
                triangles.push([a.left, b.right, b.left]);
            }
        }
        if exit.is_none() {
            if let (Some(last), Some(end)) = (all.last(), end) {
                triangles.push([last.left, last.right, end]);
            }
        }
        let shared_edges = if exit.is_some() {
            all[..all.len() - 1].to_vec()
        } else {
            all
        };
        Corridor {
            triangles,
            shared_edges,
            exit,
        }
    }

    /// Checks that each triangle advances past the previous shared edge and that no two
    /// triangles overlap in their interiors.
    pub fn validate(&self, tol: &Tolerances) -> Result<(), FunnelError> {
        let mut seq: Vec<Portal> = self.shared_edges.clone();
        if let Some(e) = self.exit {
            seq.push(e);
        }
        for w in seq.windows(2) {
            let (a, b) = (w[0], w[1]);
            for x in [b.left, b.right] {
                if x.approx_eq(a.left, tol.eps_geom) || x.approx_eq(a.right, tol.eps_geom) {
                    continue;
                }
                if !a.is_ahead(x, tol) {
                    return Err(FunnelError::NonSimpleCorridor(x));
                }
            }
        }
        for i in 0..self.triangles.len() {
            for j in (i + 2)..self.triangles.len() {
                if triangles_overlap(&self.triangles[i], &self.triangles[j], tol) {
                    return Err(FunnelError::NonSimpleCorridor(self.triangles[j][0]));
                }
            }
        }
        Ok(())
    }
}

fn triangles_overlap(t1: &[Point2; 3], t2: &[Point2; 3], tol: &Tolerances) -> bool {
    let proper = |a: Point2, b: Point2, c: Point2, d: Point2| {
        let o1 = orient(a, b, c, tol);
        let o2 = orient(a, b, d, tol);
        let o3 = orient(c, d, a, tol);
        let o4 = orient(c, d, b, tol);
        o1 != Orientation::Collinear
            && o2 != Orientation::Collinear
            && o3 != Orientation::Collinear
            && o4 != Orientation::Collinear
            && o1 != o2
            && o3 != o4
    };
    for i in 0..3 {
        for j in 0..3 {
            if proper(t1[i], t1[(i + 1) % 3], t2[j], t2[(j + 1) % 3]) {
                return true;
            }
        }
    }
    let centroid = |t: &[Point2; 3]| Point2::new((t[0].x + t[1].x + t[2].x) / 3.0, (t[0].y + t[1].y + t[2].y) / 3.0);
    strictly_inside(t1, centroid(t2), tol) || strictly_inside(t2, centroid(t1), tol)
}

fn strictly_inside(t: &[Point2; 3], x: Point2, tol: &Tolerances) -> bool {
    let s = cross3(t[0], t[1], t[2]).signum();
    if s == 0.0 {
        return false;
    }
    (0..3).all(|i| {
        let o = orient(t[i], t[(i + 1) % 3], x, tol);
        match o {
            Orientation::Left => s > 0.0,
            Orientation::Right => s < 0.0,
            Orientation::Collinear => false,
        }
    })
}

fn in_triangle_closed(t: &[Point2; 3], x: Point2, tol: &Tolerances) -> bool {
    if (0..3).any(|i| Segment::new(t[i], t[(i + 1) % 3]).contains(x, tol.eps_geom)) {
        return true;
    }
    let s = cross3(t[0], t[1], t[2]);
    if s == 0.0 {
        return false;
    }
    (0..3).all(|i| cross3(t[i], t[(i + 1) % 3], x) * s >= 0.0)
}

/// Portals of a whole bundle sequence: every bundle segment in traversal order, with one
/// diagonal between consecutive bundles when their segments do not already share an endpoint.
#[derive(Debug, Clone, PartialEq)]
pub struct PortalChain {
    pub portals: Vec<Portal>,
    pub kinds: Vec<PortalKind>,
    /// Index of each bundle's last segment portal.
    last_of_bundle: Vec<Option<usize>>,
}

impl PortalChain {
    pub fn build(seq: &BundleSequence, tol: &Tolerances) -> Result<Self, GeometryError> {
        let mut portals = Vec::new();
        let mut kinds = Vec::new();
        let mut last_of_bundle = vec![None; seq.bundles.len()];
        let mut prev: Option<(usize, Portal, bool)> = None;
        for (bi, b) in seq.bundles.iter().enumerate() {
            if b.is_degenerate() {
                continue;
            }
            let oriented = orient_bundle(seq, bi, b, tol)?;
            if let (Some((pbi, p, p_far_left)), Some(&(first, _))) = (prev, oriented.first()) {
                if let Some(d) = pick_diagonal(&p, &first, p_far_left, tol) {
                    portals.push(d);
                    kinds.push(PortalKind::Diagonal { after_bundle: pbi });
                }
            }
            for (si, (portal, _)) in oriented.iter().enumerate() {
                portals.push(*portal);
                kinds.push(PortalKind::Segment { bundle: bi, index: si });
            }
            last_of_bundle[bi] = Some(portals.len() - 1);
            let (last, far_left) = *oriented.last().expect("non-degenerate");
            prev = Some((bi, last, far_left));
        }
        Ok(PortalChain {
            portals,
            kinds,
            last_of_bundle,
        })
    }

    pub fn last_portal_of(&self, bundle: usize) -> Option<usize> {
        self.last_of_bundle.get(bundle).copied().flatten()
    }

    /// Portal index range passed strictly between bundles `from` (exclusive, its last segment
    /// already behind) and `to` (inclusive, through its last segment). Degenerate endpoints
    /// extend to the chain ends.
    pub fn range_between(&self, from: usize, to: usize) -> Range<usize> {
        let start = match self.last_portal_of(from) {
            Some(i) => i + 1,
            None => 0,
        };
        let end = match self.last_portal_of(to) {
            Some(i) => i + 1,
            None => self.portals.len(),
        };
        start..end.max(start)
    }
}

/// Portals of one bundle, each flagged with whether its far endpoint is the left one.
fn orient_bundle(
    seq: &BundleSequence,
    bi: usize,
    b: &Bundle,
    tol: &Tolerances,
) -> Result<Vec<(Portal, bool)>, GeometryError> {
    b.segments
        .iter()
        .map(|s| {
            let side = seq.side_at(bi, s.b, tol)?;
            Ok(if side == Orientation::Right {
                (Portal::new(b.vertex, s.b), false)
            } else {
                (Portal::new(s.b, b.vertex), true)
            })
        })
        .collect()
}

fn pick_diagonal(p: &Portal, q: &Portal, p_far_left: bool, tol: &Tolerances) -> Option<Portal> {
    if p.shares_endpoint(q, tol.eps_geom) {
        return None;
    }
    let d1 = Portal::new(p.left, q.right);
    let d2 = Portal::new(q.left, p.right);
    let valid = |d: &Portal, into: Point2, out: Point2| p.is_ahead(into, tol) && d.is_ahead(out, tol);
    let ok1 = valid(&d1, q.right, q.left);
    let ok2 = valid(&d2, q.left, q.right);
    match (p_far_left, ok1, ok2) {
        (true, true, _) => Some(d1),
        (false, _, true) => Some(d2),
        (_, true, _) => Some(d1),
        (_, _, true) => Some(d2),
        _ => None,
    }
}

/// Whether every bundle segment is crossed from behind to ahead: the previous bundle (or `p`)
/// and earlier segments of the same fan lie on or behind it, the next bundle (or `q`) and
/// later segments on or ahead of it. When this holds the corridor path and the shortest path
/// touching the segments in order coincide.
pub fn is_regular_sleeve(seq: &BundleSequence, tol: &Tolerances) -> Result<bool, GeometryError> {
    let points_of = |b: &Bundle| -> Vec<Point2> {
        std::iter::once(b.vertex).chain(b.segments.iter().map(|s| s.b)).collect()
    };
    let n = seq.bundles.len();
    for bi in 1..n.saturating_sub(1) {
        let b = &seq.bundles[bi];
        let oriented = orient_bundle(seq, bi, b, tol)?;
        let before = points_of(&seq.bundles[bi - 1]);
        let after = points_of(&seq.bundles[bi + 1]);
        for (si, (portal, _)) in oriented.iter().enumerate() {
            let is_end = |x: Point2| x.approx_eq(portal.left, tol.eps_geom) || x.approx_eq(portal.right, tol.eps_geom);
            let behind = before.iter().chain(b.segments[..si].iter().map(|s| &s.b));
            let ahead = after.iter().chain(b.segments[si + 1..].iter().map(|s| &s.b));
            for &x in behind {
                if !is_end(x) && portal.is_ahead(x, tol) {
                    return Ok(false);
                }
            }
            for &x in ahead {
                if !is_end(x) && orient(portal.right, portal.left, x, tol) == Orientation::Left {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Builds the corridor for bundles `range` of `seq`, entered at `entry`. When the range ends
/// before `q`, the last bundle's last segment is the exit edge.
pub fn triangulate_subsequence(
    seq: &BundleSequence,
    range: Range<usize>,
    entry: Point2,
    tol: &Tolerances,
) -> Result<Corridor, FunnelError> {
    let chain = PortalChain::build(seq, tol)?;
    let last = range.end.saturating_sub(1);
    let before = range.start.saturating_sub(1);
    let span = if range.start == 0 {
        chain.range_between(usize::MAX, last)
    } else {
        chain.range_between(before, last)
    };
    let mut start = span.start;
    // The entry diagonal belongs to the quadrilateral before the first bundle; the entry
    // point already sits past it.
    while range.start > 0 && start < span.end && matches!(chain.kinds[start], PortalKind::Diagonal { .. }) {
        start += 1;
    }
    let mut portals: Vec<Portal> = chain.portals[start..span.end].to_vec();
    let ends_at_q = last + 1 >= seq.bundles.len();
    let exit = if ends_at_q { None } else { portals.pop() };
    let corridor = Corridor::from_portals(entry, &portals, exit, ends_at_q.then(|| seq.q()));
    corridor.validate(tol)?;
    // Adjacent bundles must not cross for the triangles to tile a sleeve.
    for w in seq.bundles[range.clone()].windows(2) {
        if crate::bundles::bundles_intersect(&w[0], &w[1], tol) {
            return Err(FunnelError::NonSimpleCorridor(w[1].vertex));
        }
    }
    Ok(corridor)
}

/// Shortest path from `src` (in the first triangle) to `dst` (in the last triangle, or on the exit edge).
pub fn shortest_path_corridor(
    c: &Corridor,
    src: Point2,
    dst: Point2,
    tol: &Tolerances,
) -> Result<PolylinePath, FunnelError> {
    if let Some(first) = c.triangles.first() {
        if !in_triangle_closed(first, src, tol) {
            return Err(FunnelError::PointOutsideCorridor(src));
        }
    }
    if let Some(last) = c.triangles.last() {
        let on_exit = c.exit.is_some_and(|e| e.segment().contains(dst, tol.eps_geom));
        if !on_exit && !in_triangle_closed(last, dst, tol) {
            return Err(FunnelError::PointOutsideCorridor(dst));
        }
    }
    Ok(string_pull(src, &c.shared_edges, dst, tol))
}

/// Funnel sweep over an ordered portal list.
pub fn string_pull(src: Point2, portals: &[Portal], dst: Point2, tol: &Tolerances) -> PolylinePath {
    let eps = tol.eps_geom;
    let mut pts: Vec<(Point2, Point2)> = Vec::with_capacity(portals.len() + 2);
    pts.push((src, src));
    pts.extend(portals.iter().map(|p| (p.left, p.right)));
    pts.push((dst, dst));

    let mut path = vec![src];
    let (mut apex, mut left, mut right) = (src, src, src);
    let (mut left_i, mut right_i) = (0usize, 0usize);
    let mut i = 1usize;
    let guard_limit = 4 * pts.len() * pts.len() + 16;
    let mut guard = 0usize;

    while i < pts.len() {
        guard += 1;
        if guard > guard_limit {
            break;
        }
        let (pl, pr) = pts[i];

        if orient(apex, right, pr, tol) != Orientation::Right {
            if apex.approx_eq(right, eps) || !crosses(apex, left, pr, Orientation::Left, tol) {
                right = pr;
                right_i = i;
            } else {
                path.push(left);
                apex = left;
                let apex_i = left_i;
                left = apex;
                right = apex;
                left_i = apex_i;
                right_i = apex_i;
                i = apex_i + 1;
                continue;
            }
        }

        if orient(apex, left, pl, tol) != Orientation::Left {
            if apex.approx_eq(left, eps) || !crosses(apex, right, pl, Orientation::Right, tol) {
                left = pl;
                left_i = i;
            } else {
                path.push(right);
                apex = right;
                let apex_i = right_i;
                left = apex;
                right = apex;
                left_i = apex_i;
                right_i = apex_i;
                i = apex_i + 1;
                continue;
            }
        }
        i += 1;
    }
    path.push(dst);
    simplify_collinear(PolylinePath::with_eps(path, eps), tol)
}

/// Whether `x` falls outside the funnel edge `apex -> edge` on the `outside` side. A point on
/// the edge's own ray does not block, one on the opposite ray does.
fn crosses(apex: Point2, edge: Point2, x: Point2, outside: Orientation, tol: &Tolerances) -> bool {
    match orient(apex, edge, x, tol) {
        Orientation::Collinear => (x - apex).dot(edge - apex) < 0.0,
        o => o == outside,
    }
}

/// Drops interior vertices lying on the straight line through their neighbours.
fn simplify_collinear(path: PolylinePath, tol: &Tolerances) -> PolylinePath {
    let v = path.vertices();
    if v.len() < 3 {
        return path;
    }
    let mut out: Vec<Point2> = vec![v[0]];
    for k in 1..v.len() - 1 {
        let a = *out.last().unwrap();
        let b = v[k];
        let c = v[k + 1];
        let straight = Segment::new(a, c).distance_to(b) <= tol.eps_geom
            && (b - a).dot(c - b) >= 0.0;
        if !straight {
            out.push(b);
        }
    }
    out.push(v[v.len() - 1]);
    PolylinePath::with_eps(out, tol.eps_geom)
}

/// Where a path first touches a portal, and the arc length at that point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crossing {
    pub point: Point2,
    pub param: f64,
}

/// First touching point of `path` with each portal, walking the portals in order.
pub fn portal_crossings(path: &PolylinePath, portals: &[Portal], tol: &Tolerances) -> Vec<Crossing> {
    let verts = path.vertices();
    let arcs = path.arc_lengths();
    let mut out = Vec::with_capacity(portals.len());
    if verts.len() == 1 {
        for _ in portals {
            out.push(Crossing {
                point: verts[0],
                param: 0.0,
            });
        }
        return out;
    }
    let mut cur_param = 0.0f64;
    let mut cur_edge = 0usize;
    for portal in portals {
        let seg = portal.segment();
        let mut found: Option<(usize, Crossing)> = None;
        for e in cur_edge..verts.len() - 1 {
            let edge = Segment::new(verts[e], verts[e + 1]);
            let hit = match segment_intersection(edge, seg, tol) {
                SegmentIntersection::Empty => None,
                SegmentIntersection::Point(x) => Some(x),
                SegmentIntersection::Overlap(o) => Some(if o.a.dist(edge.a) <= o.b.dist(edge.a) { o.a } else { o.b }),
            };
            if let Some(x) = hit {
                let param = arcs[e] + verts[e].dist(x);
                if param + tol.eps_geom >= cur_param {
                    found = Some((e, Crossing { point: x, param: param.max(cur_param) }));
                    break;
                }
            }
        }
        let (e, c) = found.unwrap_or_else(|| nearest_crossing(verts, &arcs, cur_edge, cur_param, &seg));
        cur_edge = e;
        cur_param = c.param;
        out.push(c);
    }
    out
}

fn nearest_crossing(verts: &[Point2], arcs: &[f64], from_edge: usize, from_param: f64, seg: &Segment) -> (usize, Crossing) {
    let mut best = (f64::INFINITY, from_edge, Crossing { point: verts[from_edge], param: from_param });
    for e in from_edge..verts.len() - 1 {
        let edge = Segment::new(verts[e], verts[e + 1]);
        // Sample-free closest approach: check endpoints of both segments against the other.
        let cands = [
            (edge.a, seg.distance_to(edge.a)),
            (edge.b, seg.distance_to(edge.b)),
            (edge.closest_point(seg.a), seg.a.dist(edge.closest_point(seg.a))),
            (edge.closest_point(seg.b), seg.b.dist(edge.closest_point(seg.b))),
        ];
        for (x, d) in cands {
            let param = arcs[e] + verts[e].dist(x);
            if d < best.0 && param >= from_param {
                best = (d, e, Crossing { point: x, param });
            }
        }
    }
    (best.1, best.2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundles::Bundle;
    use crate::geometry::pt;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn straight_through_portal() {
        let c = Corridor::from_portals(pt(0., 0.), &[Portal::new(pt(2., 1.), pt(2., -1.))], None, Some(pt(4., 0.)));
        let p = shortest_path_corridor(&c, pt(0., 0.), pt(4., 0.), &tol()).unwrap();
        assert_eq!(p.vertices(), &[pt(0., 0.), pt(4., 0.)]);
        assert_eq!(p.length(), 4.0);
    }

    #[test]
    fn forced_onto_portal_endpoint() {
        let c = Corridor::from_portals(pt(0., 0.), &[Portal::new(pt(2., 2.), pt(2., 1.))], None, Some(pt(4., 0.)));
        let p = shortest_path_corridor(&c, pt(0., 0.), pt(4., 0.), &tol()).unwrap();
        assert_eq!(p.vertices(), &[pt(0., 0.), pt(2., 1.), pt(4., 0.)]);
        assert!((p.length() - 2.0 * 5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn outside_point_rejected() {
        let c = Corridor::from_portals(pt(0., 0.), &[Portal::new(pt(2., 1.), pt(2., -1.))], None, Some(pt(4., 0.)));
        assert_eq!(
            shortest_path_corridor(&c, pt(-5., 0.), pt(4., 0.), &tol()),
            Err(FunnelError::PointOutsideCorridor(pt(-5., 0.)))
        );
    }

    #[test]
    fn one_bundle_corridor() {
        let t = tol();
        let seq = BundleSequence::new(
            pt(0., 0.),
            vec![Bundle::from_endpoints(pt(2., 0.), [pt(2., 1.), pt(2.5, 1.)])],
            pt(4., 0.),
        );
        let c = triangulate_subsequence(&seq, 0..2, pt(0., 0.), &t).unwrap();
        assert_eq!(c.triangles.len(), 2);
        assert_eq!(c.triangles[0], [pt(0., 0.), pt(2., 1.), pt(2., 0.)]);
        assert_eq!(c.triangles[1], [pt(2., 0.), pt(2.5, 1.), pt(2., 1.)]);
        assert_eq!(c.shared_edges, vec![Portal::new(pt(2., 1.), pt(2., 0.))]);
        assert_eq!(c.exit, Some(Portal::new(pt(2.5, 1.), pt(2., 0.))));
    }

    #[test]
    fn minimal_corridor() {
        let t = tol();
        let seq = BundleSequence::new(
            pt(0., 0.),
            vec![Bundle::from_endpoints(pt(2., 0.), [pt(2., 1.)])],
            pt(4., 0.),
        );
        let c = triangulate_subsequence(&seq, 0..2, pt(0., 0.), &t).unwrap();
        assert_eq!(c.triangles, vec![[pt(0., 0.), pt(2., 1.), pt(2., 0.)]]);
        assert!(c.shared_edges.is_empty());
    }

    #[test]
    fn crossing_bundles_rejected() {
        let t = tol();
        let seq = BundleSequence::new(
            pt(-1., 0.),
            vec![
                Bundle::from_endpoints(pt(0., 0.), [pt(2., 2.)]),
                Bundle::from_endpoints(pt(2., 0.), [pt(0., 2.)]),
            ],
            pt(3., 0.),
        );
        assert!(matches!(
            triangulate_subsequence(&seq, 0..4, pt(-1., 0.), &t),
            Err(FunnelError::NonSimpleCorridor(_))
        ));
    }

    #[test]
    fn crossings_follow_portal_order() {
        let t = tol();
        let portals = [
            Portal::new(pt(1., 1.), pt(1., -1.)),
            Portal::new(pt(2., 2.), pt(2., 1.)),
            Portal::new(pt(3., 1.), pt(3., -1.)),
        ];
        let p = string_pull(pt(0., 0.), &portals, pt(4., 0.), &t);
        assert_eq!(p.vertices(), &[pt(0., 0.), pt(2., 1.), pt(4., 0.)]);
        let c = portal_crossings(&p, &portals, &t);
        assert!(c[0].point.approx_eq(pt(1., 0.5), 1e-12));
        assert!(c[1].point.approx_eq(pt(2., 1.), 1e-12));
        assert!(c[2].point.approx_eq(pt(3., 0.5), 1e-12));
        assert!(c.windows(2).all(|w| w[0].param <= w[1].param));
    }

    #[test]
    fn fan_with_shared_vertex_hugs_the_vertex() {
        let t = tol();
        // Right-side bundle: the path must touch every segment, all share (2,0).
        let portals = [
            Portal::new(pt(2., 0.), pt(1.5, -1.)),
            Portal::new(pt(2., 0.), pt(2., -1.)),
            Portal::new(pt(2., 0.), pt(2.5, -1.)),
        ];
        let p = string_pull(pt(0., 1.), &portals, pt(4., 1.), &t);
        assert_eq!(p.vertices(), &[pt(0., 1.), pt(2., 0.), pt(4., 1.)]);
    }
}

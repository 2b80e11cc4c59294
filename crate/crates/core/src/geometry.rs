//! Planar primitives with tolerance-banded predicates.
//!
//! Every predicate here works on plain `f64` coordinates. Near-degenerate
//! configurations are snapped using [`Tolerances::eps_geom`], scaled by the
//! magnitude of the inputs so the same tolerance stays meaningful on maps
//! with coordinates in the hundreds.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("vector has zero length")]
    ZeroVector,
    #[error("polyline has no two distinct vertices")]
    DegeneratePolyline,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

/// Shorthand constructor.
#[inline]
pub const fn pt(x: f64, y: f64) -> Point2 {
    Point2 { x, y }
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    #[inline]
    pub fn dot(self, o: Point2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the 2D cross product.
    #[inline]
    pub fn cross(self, o: Point2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    #[inline]
    pub fn dist(self, o: Point2) -> f64 {
        (self - o).norm()
    }

    pub fn lerp(self, o: Point2, t: f64) -> Point2 {
        pt(self.x + (o.x - self.x) * t, self.y + (o.y - self.y) * t)
    }

    pub fn midpoint(self, o: Point2) -> Point2 {
        self.lerp(o, 0.5)
    }

    /// Polar angle in `(-π, π]`.
    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }

    pub fn from_polar(r: f64, theta: f64) -> Point2 {
        pt(r * theta.cos(), r * theta.sin())
    }

    pub fn approx_eq(self, o: Point2, eps: f64) -> bool {
        self.dist(o) <= eps
    }
}

impl fmt::Display for Point2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl Add for Point2 {
    type Output = Point2;
    fn add(self, o: Point2) -> Point2 {
        pt(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point2 {
    type Output = Point2;
    fn sub(self, o: Point2) -> Point2 {
        pt(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, s: f64) -> Point2 {
        pt(self.x * s, self.y * s)
    }
}

impl Neg for Point2 {
    type Output = Point2;
    fn neg(self) -> Point2 {
        pt(-self.x, -self.y)
    }
}

/// Closed segment `[a, b]`. `a == b` is allowed and denotes a single point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub a: Point2,
    pub b: Point2,
}

impl Segment {
    pub const fn new(a: Point2, b: Point2) -> Self {
        Segment { a, b }
    }

    pub fn point(p: Point2) -> Self {
        Segment { a: p, b: p }
    }

    pub fn length(&self) -> f64 {
        self.a.dist(self.b)
    }

    pub fn is_degenerate(&self, eps: f64) -> bool {
        self.length() <= eps
    }

    pub fn reversed(&self) -> Segment {
        Segment::new(self.b, self.a)
    }

    pub fn at(&self, t: f64) -> Point2 {
        self.a.lerp(self.b, t)
    }

    /// Parameter of the closest point of the segment to `p`, in `[0, 1]`.
    pub fn project_param(&self, p: Point2) -> f64 {
        let d = self.b - self.a;
        let len2 = d.dot(d);
        if len2 == 0.0 {
            return 0.0;
        }
        ((p - self.a).dot(d) / len2).clamp(0.0, 1.0)
    }

    pub fn closest_point(&self, p: Point2) -> Point2 {
        self.at(self.project_param(p))
    }

    pub fn distance_to(&self, p: Point2) -> f64 {
        self.closest_point(p).dist(p)
    }

    pub fn contains(&self, p: Point2, eps: f64) -> bool {
        self.distance_to(p) <= eps
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Coincidence / orientation tolerance in map units.
    pub eps_geom: f64,
    /// Angular tolerance in radians.
    pub tol_angle: f64,
    /// Relative length tolerance.
    pub tol_len: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            eps_geom: 1e-9,
            tol_angle: 1e-7,
            tol_len: 1e-10,
        }
    }
}

impl Tolerances {
    pub fn is_valid(&self) -> bool {
        self.eps_geom > 0.0 && self.tol_angle > 0.0 && self.tol_len > 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Orientation {
    Left,
    Right,
    Collinear,
}

impl Orientation {
    pub fn reversed(self) -> Orientation {
        match self {
            Orientation::Left => Orientation::Right,
            Orientation::Right => Orientation::Left,
            Orientation::Collinear => Orientation::Collinear,
        }
    }
}

/// Twice the signed area of triangle `pqr`; positive when `r` is left of `p -> q`.
#[inline]
pub fn cross3(p: Point2, q: Point2, r: Point2) -> f64 {
    (q - p).cross(r - p)
}

/// Orientation of `r` relative to the directed line `p -> q`.
///
/// The collinear band is `eps_geom * max(1, |q - p| * |r - p|)`, i.e. a bound
/// on the sine of the angle at `p` once the inputs are longer than unit size.
pub fn orient(p: Point2, q: Point2, r: Point2, tol: &Tolerances) -> Orientation {
    let area = cross3(p, q, r);
    let scale = ((q - p).norm() * (r - p).norm()).max(1.0);
    if area.abs() <= tol.eps_geom * scale {
        Orientation::Collinear
    } else if area > 0.0 {
        Orientation::Left
    } else {
        Orientation::Right
    }
}

/// Unsigned angle between two vectors, in `[0, π]`.
pub fn angle_between(u: Point2, v: Point2, tol: &Tolerances) -> Result<f64, GeometryError> {
    let nu = u.norm();
    let nv = v.norm();
    if nu <= tol.eps_geom || nv <= tol.eps_geom {
        return Err(GeometryError::ZeroVector);
    }
    // atan2 keeps full precision near 0 and π where acos does not.
    let a = u.cross(v).abs().atan2(u.dot(v));
    Ok(a.clamp(0.0, PI))
}

/// Counterclockwise rotation carrying direction `from` onto direction `to`, in `[0, 2π)`.
pub fn ccw_angle(from: Point2, to: Point2) -> f64 {
    let a = from.cross(to).atan2(from.dot(to));
    if a < 0.0 {
        a + TAU
    } else {
        a
    }
}

/// Normalise an angle into `[0, 2π)`.
pub fn normalize_angle(a: f64) -> f64 {
    let r = a.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SegmentIntersection {
    Empty,
    Point(Point2),
    Overlap(Segment),
}

impl SegmentIntersection {
    pub fn is_empty(&self) -> bool {
        matches!(self, SegmentIntersection::Empty)
    }
}

pub fn segment_intersection(s1: Segment, s2: Segment, tol: &Tolerances) -> SegmentIntersection {
    let eps = tol.eps_geom;
    let deg1 = s1.is_degenerate(eps);
    let deg2 = s2.is_degenerate(eps);
    match (deg1, deg2) {
        (true, true) => {
            return if s1.a.approx_eq(s2.a, eps) {
                SegmentIntersection::Point(s1.a)
            } else {
                SegmentIntersection::Empty
            };
        }
        (true, false) => {
            return if s2.contains(s1.a, eps) {
                SegmentIntersection::Point(s1.a)
            } else {
                SegmentIntersection::Empty
            };
        }
        (false, true) => {
            return if s1.contains(s2.a, eps) {
                SegmentIntersection::Point(s2.a)
            } else {
                SegmentIntersection::Empty
            };
        }
        _ => {}
    }

    let d1 = s1.b - s1.a;
    let d2 = s2.b - s2.a;
    let len1 = d1.norm();
    let len2 = d2.norm();
    let denom = d1.cross(d2);
    let w = s2.a - s1.a;

    // Parallel when the sine of the angle between them vanishes.
    if denom.abs() <= eps * len1 * len2 {
        let off_line = w.cross(d1).abs() / len1;
        if off_line > eps {
            return SegmentIntersection::Empty;
        }
        let ta = w.dot(d1) / (len1 * len1);
        let tb = (s2.b - s1.a).dot(d1) / (len1 * len1);
        let lo = ta.min(tb).max(0.0);
        let hi = ta.max(tb).min(1.0);
        let slack = eps / len1;
        if lo > hi + slack {
            return SegmentIntersection::Empty;
        }
        if (hi - lo) * len1 <= eps {
            let t = (0.5 * (lo + hi)).clamp(0.0, 1.0);
            return SegmentIntersection::Point(s1.at(t));
        }
        return SegmentIntersection::Overlap(Segment::new(s1.at(lo), s1.at(hi)));
    }

    let t = w.cross(d2) / denom;
    let u = w.cross(d1) / denom;
    let st = eps / len1;
    let su = eps / len2;
    if t < -st || t > 1.0 + st || u < -su || u > 1.0 + su {
        // The parametric test can reject touching configurations in
        // nearly-parallel cases; fall back to endpoint distances.
        for (p, s) in [(s1.a, &s2), (s1.b, &s2), (s2.a, &s1), (s2.b, &s1)] {
            if s.contains(p, eps) {
                return SegmentIntersection::Point(p);
            }
        }
        return SegmentIntersection::Empty;
    }
    SegmentIntersection::Point(s1.at(t.clamp(0.0, 1.0)))
}

/// Ordered list of vertices with a cached total length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolylinePath {
    vertices: Vec<Point2>,
    length: f64,
}

impl PolylinePath {
    /// Builds a path, collapsing consecutive vertices closer than `eps`.
    pub fn with_eps(points: impl IntoIterator<Item = Point2>, eps: f64) -> Self {
        let mut vertices: Vec<Point2> = Vec::new();
        for p in points {
            match vertices.last() {
                Some(&last) if last.approx_eq(p, eps) => {}
                _ => vertices.push(p),
            }
        }
        let length = vertices.windows(2).map(|w| w[0].dist(w[1])).sum();
        PolylinePath { vertices, length }
    }

    pub fn new(points: impl IntoIterator<Item = Point2>) -> Self {
        Self::with_eps(points, Tolerances::default().eps_geom)
    }

    pub fn single(p: Point2) -> Self {
        PolylinePath {
            vertices: vec![p],
            length: 0.0,
        }
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn first(&self) -> Option<Point2> {
        self.vertices.first().copied()
    }

    pub fn last(&self) -> Option<Point2> {
        self.vertices.last().copied()
    }

    pub fn edges(&self) -> impl Iterator<Item = Segment> + '_ {
        self.vertices.windows(2).map(|w| Segment::new(w[0], w[1]))
    }

    pub fn reversed(&self) -> PolylinePath {
        let mut v = self.vertices.clone();
        v.reverse();
        PolylinePath {
            vertices: v,
            length: self.length,
        }
    }

    /// Cumulative arc length at each vertex.
    pub fn arc_lengths(&self) -> Vec<f64> {
        let mut acc = 0.0;
        let mut out = Vec::with_capacity(self.vertices.len());
        for (i, v) in self.vertices.iter().enumerate() {
            if i > 0 {
                acc += self.vertices[i - 1].dist(*v);
            }
            out.push(acc);
        }
        out
    }

    /// Point at arc length `s` (clamped to the path).
    pub fn point_at(&self, s: f64) -> Point2 {
        let mut acc = 0.0;
        for w in self.vertices.windows(2) {
            let l = w[0].dist(w[1]);
            if acc + l >= s && l > 0.0 {
                return w[0].lerp(w[1], ((s - acc) / l).clamp(0.0, 1.0));
            }
            acc += l;
        }
        self.vertices.last().copied().unwrap_or_default()
    }

    /// Appends another path, dropping its first vertex when it repeats our last.
    pub fn concat(&self, other: &PolylinePath, eps: f64) -> PolylinePath {
        PolylinePath::with_eps(
            self.vertices.iter().chain(other.vertices.iter()).copied(),
            eps,
        )
    }

    /// Shortest distance from `p` to the path.
    pub fn distance_to(&self, p: Point2) -> f64 {
        if self.vertices.len() == 1 {
            return self.vertices[0].dist(p);
        }
        self.edges()
            .map(|e| e.distance_to(p))
            .fold(f64::INFINITY, f64::min)
    }
}

/// Side of `x` relative to the open polyline `tau` traversed first to last.
///
/// The nearest edge decides. When the nearest point is an interior vertex
/// shared by two edges, the wedge at that vertex decides instead, so points
/// near a sharp turn are classified consistently on both of its edges.
pub fn side_of_polyline(
    tau: &PolylinePath,
    x: Point2,
    tol: &Tolerances,
) -> Result<Orientation, GeometryError> {
    let verts: Vec<Point2> = PolylinePath::with_eps(tau.vertices().iter().copied(), tol.eps_geom)
        .vertices()
        .to_vec();
    if verts.len() < 2 {
        return Err(GeometryError::DegeneratePolyline);
    }

    let mut best = (f64::INFINITY, 0usize, 0.0f64);
    for (k, w) in verts.windows(2).enumerate() {
        let seg = Segment::new(w[0], w[1]);
        let t = seg.project_param(x);
        let d = seg.at(t).dist(x);
        if d < best.0 {
            best = (d, k, t);
        }
    }
    let (dist, k, t) = best;
    if dist <= tol.eps_geom {
        return Ok(Orientation::Collinear);
    }

    let nedges = verts.len() - 1;
    let at_shared_vertex = if t >= 1.0 && k + 1 < nedges {
        Some(k + 1)
    } else if t <= 0.0 && k > 0 {
        Some(k)
    } else {
        None
    };

    if let Some(vi) = at_shared_vertex {
        let a = verts[vi];
        let to_prev = verts[vi - 1] - a;
        let to_next = verts[vi + 1] - a;
        let dir = x - a;
        // Left region: sweeping counterclockwise from the outgoing edge to the incoming one.
        let span = ccw_angle(to_next, to_prev);
        let ax = ccw_angle(to_next, dir);
        let band = tol.tol_angle;
        if ax.abs() <= band || (ax - span).abs() <= band || (TAU - ax) <= band {
            return Ok(orient(verts[k], verts[k + 1], x, tol));
        }
        return Ok(if ax < span {
            Orientation::Left
        } else {
            Orientation::Right
        });
    }

    Ok(orient(verts[k], verts[k + 1], x, tol))
}

/// Closed point-in-polygon test (boundary counts as inside).
pub fn point_in_polygon(poly: &[Point2], p: Point2) -> bool {
    let n = poly.len();
    if n < 3 {
        return false;
    }
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (poly[i], poly[j]);
        if (a.y > p.y) != (b.y > p.y) {
            let x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if p.x < x {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

/// Strict interior test: inside the polygon and farther than `eps` from its boundary.
pub fn point_strictly_in_polygon(poly: &[Point2], p: Point2, eps: f64) -> bool {
    if !point_in_polygon(poly, p) {
        return false;
    }
    let n = poly.len();
    (0..n).all(|i| Segment::new(poly[i], poly[(i + 1) % n]).distance_to(p) > eps)
}

/// Signed area, positive for counterclockwise vertex order.
pub fn polygon_signed_area(poly: &[Point2]) -> f64 {
    let n = poly.len();
    (0..n)
        .map(|i| poly[i].cross(poly[(i + 1) % n]))
        .sum::<f64>()
        * 0.5
}

/// True when no two non-adjacent edges touch and no adjacent edges overlap.
pub fn polygon_is_simple(poly: &[Point2], tol: &Tolerances) -> bool {
    let n = poly.len();
    if n < 3 {
        return false;
    }
    let edge = |i: usize| Segment::new(poly[i], poly[(i + 1) % n]);
    for i in 0..n {
        if edge(i).is_degenerate(tol.eps_geom) {
            return false;
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            let hit = segment_intersection(edge(i), edge(j), tol);
            if adjacent {
                if let SegmentIntersection::Overlap(_) = hit {
                    return false;
                }
                if n == 3 {
                    continue;
                }
            } else if !hit.is_empty() {
                return false;
            }
        }
    }
    polygon_signed_area(poly).abs() > tol.eps_geom
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn orient_examples() {
        let t = tol();
        assert_eq!(orient(pt(0., 0.), pt(1., 0.), pt(0., 1.), &t), Orientation::Left);
        assert_eq!(orient(pt(0., 0.), pt(1., 0.), pt(2., 0.), &t), Orientation::Collinear);
        assert_eq!(orient(pt(0., 0.), pt(1., 0.), pt(0., -1.), &t), Orientation::Right);
    }

    #[test]
    fn angle_examples() {
        let t = tol();
        assert!((angle_between(pt(1., 0.), pt(0., 1.), &t).unwrap() - PI / 2.0).abs() < 1e-15);
        assert_eq!(angle_between(pt(1., 0.), pt(1., 0.), &t).unwrap(), 0.0);
        assert!((angle_between(pt(1., 0.), pt(-1., 0.), &t).unwrap() - PI).abs() < 1e-15);
        assert_eq!(
            angle_between(pt(0., 0.), pt(1., 0.), &t),
            Err(GeometryError::ZeroVector)
        );
    }

    #[test]
    fn intersection_examples() {
        let t = tol();
        let s = |a: (f64, f64), b: (f64, f64)| Segment::new(pt(a.0, a.1), pt(b.0, b.1));
        assert_eq!(
            segment_intersection(s((0., 0.), (2., 0.)), s((1., -1.), (1., 1.)), &t),
            SegmentIntersection::Point(pt(1., 0.))
        );
        assert_eq!(
            segment_intersection(s((0., 0.), (1., 0.)), s((2., 0.), (3., 0.)), &t),
            SegmentIntersection::Empty
        );
        assert_eq!(
            segment_intersection(s((0., 0.), (2., 0.)), s((1., 0.), (3., 0.)), &t),
            SegmentIntersection::Overlap(s((1., 0.), (2., 0.)))
        );
        // touching at a shared endpoint
        assert_eq!(
            segment_intersection(s((0., 0.), (1., 1.)), s((1., 1.), (2., 0.)), &t),
            SegmentIntersection::Point(pt(1., 1.))
        );
    }

    #[test]
    fn side_examples() {
        let t = tol();
        let tau = PolylinePath::new([pt(0., 0.), pt(4., 0.)]);
        assert_eq!(side_of_polyline(&tau, pt(2., -1.), &t).unwrap(), Orientation::Right);
        assert_eq!(side_of_polyline(&tau, pt(2., 1.), &t).unwrap(), Orientation::Left);
        assert_eq!(side_of_polyline(&tau, pt(2., 0.), &t).unwrap(), Orientation::Collinear);
        let flat = PolylinePath::new([pt(1., 1.), pt(1., 1.)]);
        assert_eq!(
            side_of_polyline(&flat, pt(0., 0.), &t),
            Err(GeometryError::DegeneratePolyline)
        );
    }

    #[test]
    fn side_at_sharp_vertex_uses_wedge() {
        let t = tol();
        // Left turn by 150 degrees at (0,0).
        let tau = PolylinePath::new([pt(-5., 0.), pt(0., 0.), pt(-4., 2.)]);
        // Inside the turn, nearest point is the shared vertex.
        assert_eq!(side_of_polyline(&tau, pt(-1., 0.2), &t).unwrap(), Orientation::Left);
        // Outside the turn, beyond the vertex.
        assert_eq!(side_of_polyline(&tau, pt(1., 0.), &t).unwrap(), Orientation::Right);
        assert_eq!(side_of_polyline(&tau, pt(0.5, -0.5), &t).unwrap(), Orientation::Right);
    }

    #[test]
    fn polygon_checks() {
        let t = tol();
        let sq = [pt(0., 0.), pt(1., 0.), pt(1., 1.), pt(0., 1.)];
        assert!(polygon_is_simple(&sq, &t));
        assert!(polygon_signed_area(&sq) > 0.0);
        let bow = [pt(0., 0.), pt(1., 1.), pt(1., 0.), pt(0., 1.)];
        assert!(!polygon_is_simple(&bow, &t));
        assert!(point_strictly_in_polygon(&sq, pt(0.5, 0.5), 1e-9));
        assert!(!point_strictly_in_polygon(&sq, pt(1.0, 0.5), 1e-9));
    }

    #[test]
    fn polyline_collapses_duplicates() {
        let p = PolylinePath::new([pt(0., 0.), pt(0., 0.), pt(3., 4.)]);
        assert_eq!(p.len(), 2);
        assert_eq!(p.length(), 5.0);
        assert_eq!(p.point_at(2.5), pt(1.5, 2.0));
    }
}

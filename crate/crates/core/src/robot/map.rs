use serde::{Deserialize, Serialize};

use crate::geometry::{point_in_polygon, polygon_is_simple, pt, Point2, Segment, Tolerances};

/// Polygonal obstacles plus an optional bounding rectangle `[xmin, ymin, xmax, ymax]`.
///
/// The rectangle acts as a wall: sights stop at it and points outside it are blocked.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct WorldMap {
    pub obstacles: Vec<Vec<Point2>>,
    pub bounds: Option<[f64; 4]>,
}

impl WorldMap {
    pub fn new(obstacles: Vec<Vec<Point2>>, bounds: Option<[f64; 4]>) -> Self {
        WorldMap { obstacles, bounds }
    }

    /// Index of the first obstacle that is not a simple polygon.
    pub fn first_non_simple(&self, tol: &Tolerances) -> Option<usize> {
        self.obstacles.iter().position(|p| !polygon_is_simple(p, tol))
    }

    /// Every obstacle edge, followed by the four sides of the bounds.
    pub fn edges(&self) -> Vec<Segment> {
        let mut out = Vec::new();
        for poly in &self.obstacles {
            let n = poly.len();
            for i in 0..n {
                out.push(Segment::new(poly[i], poly[(i + 1) % n]));
            }
        }
        if let Some([x0, y0, x1, y1]) = self.bounds {
            let c = [pt(x0, y0), pt(x1, y0), pt(x1, y1), pt(x0, y1)];
            for i in 0..4 {
                out.push(Segment::new(c[i], c[(i + 1) % 4]));
            }
        }
        out
    }

    fn outside_bounds(&self, p: Point2, eps: f64) -> bool {
        match self.bounds {
            Some([x0, y0, x1, y1]) => p.x < x0 - eps || p.x > x1 + eps || p.y < y0 - eps || p.y > y1 + eps,
            None => false,
        }
    }

    /// True when `p` lies strictly inside some obstacle or outside the bounds.
    pub fn is_blocked(&self, p: Point2, eps: f64) -> bool {
        if self.outside_bounds(p, eps) {
            return true;
        }
        self.obstacles.iter().any(|poly| {
            let n = poly.len();
            point_in_polygon(poly, p) && (0..n).all(|i| Segment::new(poly[i], poly[(i + 1) % n]).distance_to(p) > eps)
        })
    }

    /// Distance from `p` to the nearest wall.
    pub fn clearance(&self, p: Point2) -> f64 {
        self.edges().iter().map(|e| e.distance_to(p)).fold(f64::INFINITY, f64::min)
    }

    /// True when no point of `s` lies strictly inside an obstacle.
    ///
    /// The segment is split at every contact with a wall; the pieces in between are either
    /// wholly free or wholly blocked, so one midpoint per piece decides.
    pub fn segment_is_free(&self, s: Segment, eps: f64) -> bool {
        let mut ts = vec![0.0, 1.0];
        let d = s.b - s.a;
        let len2 = d.dot(d);
        for e in self.edges() {
            for p in [e.a, e.b] {
                if len2 > 0.0 && s.distance_to(p) <= eps {
                    ts.push(s.project_param(p));
                }
            }
            let f = e.b - e.a;
            let denom = d.cross(f);
            if denom.abs() > 1e-300 {
                let w = e.a - s.a;
                let t = w.cross(f) / denom;
                let u = w.cross(d) / denom;
                if (0.0..=1.0).contains(&t) && (0.0..=1.0).contains(&u) {
                    ts.push(t);
                }
            }
        }
        ts.sort_by(f64::total_cmp);
        ts.dedup();
        if self.is_blocked(s.a, eps) || self.is_blocked(s.b, eps) {
            return false;
        }
        ts.windows(2).all(|w| !self.is_blocked(s.at(0.5 * (w[0] + w[1])), eps))
    }

    /// Distance along the ray from `c` in direction `dir` (unit) to its first contact with a
    /// wall, capped at `r`, together with the contact point. Rays grazing a corner stop there.
    pub fn ray_contact(&self, c: Point2, dir: Point2, r: f64) -> (f64, Point2) {
        let mut best = (r, c + dir * r);
        // Relative slack on the edge parameter so rays aimed at a corner do not slip past it.
        const SLACK: f64 = 1e-9;
        for e in self.edges() {
            let f = e.b - e.a;
            let w = e.a - c;
            let denom = dir.cross(f);
            let hit = if denom.abs() <= 1e-12 * f.norm() {
                if w.cross(dir).abs() > 1e-12 * f.norm().max(1.0) {
                    continue;
                }
                // Collinear with the ray: nearest endpoint ahead.
                let (ta, tb) = (w.dot(dir), (e.b - c).dot(dir));
                let t = if ta.min(tb) >= 0.0 { ta.min(tb) } else { ta.max(tb).max(0.0) };
                if ta.max(tb) < 0.0 {
                    continue;
                }
                let p = if (ta - t).abs() <= (tb - t).abs() { e.a } else { e.b };
                (t, if t == ta || t == tb { p } else { c + dir * t })
            } else {
                let t = w.cross(f) / denom;
                let u = w.cross(dir) / denom;
                if t < 0.0 || !(-SLACK..=1.0 + SLACK).contains(&u) {
                    continue;
                }
                if u.abs() <= SLACK {
                    (c.dist(e.a), e.a)
                } else if (1.0 - u).abs() <= SLACK {
                    (c.dist(e.b), e.b)
                } else {
                    (t, c + dir * t)
                }
            };
            if hit.0 < best.0 {
                best = hit;
            }
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> WorldMap {
        WorldMap::new(vec![vec![pt(1., -1.), pt(3., -1.), pt(3., 1.), pt(1., 1.)]], None)
    }

    #[test]
    fn blocked_points() {
        let m = square();
        assert!(m.is_blocked(pt(2., 0.), 1e-9));
        assert!(!m.is_blocked(pt(1., 0.), 1e-9));
        assert!(!m.is_blocked(pt(0., 0.), 1e-9));
        let b = WorldMap::new(vec![], Some([0., 0., 10., 10.]));
        assert!(b.is_blocked(pt(-1., 5.), 1e-9));
        assert!(!b.is_blocked(pt(0., 5.), 1e-9));
    }

    #[test]
    fn segment_freedom() {
        let m = square();
        assert!(!m.segment_is_free(Segment::new(pt(0., 0.), pt(4., 0.)), 1e-9));
        assert!(m.segment_is_free(Segment::new(pt(0., 1.), pt(4., 1.)), 1e-9));
        assert!(m.segment_is_free(Segment::new(pt(0., 2.), pt(4., 2.)), 1e-9));
        assert!(!m.segment_is_free(Segment::new(pt(0., 0.5), pt(4., 2.)), 1e-9));
    }

    #[test]
    fn rays() {
        let m = square();
        let (t, p) = m.ray_contact(pt(0., 0.), pt(1., 0.), 10.0);
        assert_eq!((t, p), (1.0, pt(1., 0.)));
        let d = pt(1., 1.) * (1.0 / 2f64.sqrt());
        let (t, p) = m.ray_contact(pt(0., 0.), d, 10.0);
        assert_eq!(p, pt(1., 1.));
        assert!((t - 2f64.sqrt()).abs() < 1e-15);
        let (t, _) = m.ray_contact(pt(0., 0.), pt(-1., 0.), 10.0);
        assert_eq!(t, 10.0);
        // Collinear with the top edge.
        let (t, p) = m.ray_contact(pt(0., 1.), pt(1., 0.), 10.0);
        assert_eq!((t, p), (1.0, pt(1., 1.)));
    }
}

use std::f64::consts::{FRAC_PI_3, PI, TAU};

use serde::{Deserialize, Serialize};

use super::map::WorldMap;
use super::RobotError;
use crate::geometry::{angle_between, normalize_angle, point_in_polygon, Point2, Segment, Tolerances};

/// Counterclockwise angular range `[start, start + width]` around a center, `start` in `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sector {
    pub start: f64,
    pub width: f64,
}

impl Sector {
    pub fn end(&self) -> f64 {
        self.start + self.width
    }

    pub fn mid(&self) -> f64 {
        normalize_angle(self.start + 0.5 * self.width)
    }

    /// Counterclockwise offset of `theta` from `start`, in `[0, 2π)`.
    fn offset(&self, theta: f64) -> f64 {
        normalize_angle(theta - self.start)
    }

    pub fn contains(&self, theta: f64, slack: f64) -> bool {
        let o = self.offset(theta);
        o <= self.width + slack || o >= TAU - slack
    }
}

/// One radial sight segment: direction and the point where it stops.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SightRay {
    pub angle: f64,
    pub end: Point2,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OpenPoint {
    pub point: Point2,
    pub rank: f64,
}

/// What the robot sees from one position.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SightScan {
    pub center: Point2,
    pub radius: f64,
    pub open_sights: Vec<Sector>,
    pub closed_sights: Vec<Sector>,
    /// One per open sight, in the same order.
    pub open_points: Vec<OpenPoint>,
    /// Rays at every sector boundary and at every wall corner seen, sorted by angle.
    pub rays: Vec<SightRay>,
}

/// Part of an edge inside the closed disc, if any.
fn clip_to_disc(e: Segment, c: Point2, r: f64) -> Option<Segment> {
    let d = e.b - e.a;
    let f = e.a - c;
    let a = d.dot(d);
    if a == 0.0 {
        return (f.norm() <= r).then_some(e);
    }
    let b = 2.0 * f.dot(d);
    let cc = f.dot(f) - r * r;
    let disc = b * b - 4.0 * a * cc;
    if disc < 0.0 {
        return None;
    }
    let sq = disc.sqrt();
    let t0 = ((-b - sq) / (2.0 * a)).max(0.0);
    let t1 = ((-b + sq) / (2.0 * a)).min(1.0);
    if t0 > t1 {
        return None;
    }
    let pa = if t0 == 0.0 { e.a } else { e.at(t0) };
    let pb = if t1 == 1.0 { e.b } else { e.at(t1) };
    Some(Segment::new(pa, pb))
}

/// Union of circular intervals. Returns `None` when they cover the full circle.
fn merge_circular(mut iv: Vec<Sector>, touch: f64) -> Option<Vec<Sector>> {
    if iv.is_empty() {
        return Some(iv);
    }
    iv.sort_by(|a, b| a.start.total_cmp(&b.start).then(b.width.total_cmp(&a.width)));
    let mut out: Vec<Sector> = Vec::new();
    for s in iv {
        match out.last_mut() {
            Some(cur) if s.start <= cur.end() + touch => {
                let end = cur.end().max(s.end());
                cur.width = end - cur.start;
            }
            _ => out.push(s),
        }
    }
    // Wrap-around: the last interval may run past 2π into the first ones.
    while out.len() > 1 {
        let last = *out.last().unwrap();
        let first = out[0];
        if last.end() >= first.start + TAU - touch {
            let end = last.end().max(first.end() + TAU);
            out.remove(0);
            let l = out.last_mut().unwrap();
            l.width = end - l.start;
        } else {
            break;
        }
    }
    if out.iter().any(|s| s.width >= TAU - touch) {
        return None;
    }
    Some(out)
}

/// Sights from `center`: closed sectors are the merged angular shadows of the walls inside the
/// vision disc, and the rest is cut into equal open sectors of at most π/3.
pub fn compute_sights(map: &WorldMap, center: Point2, r: f64, tol: &Tolerances) -> Result<SightScan, RobotError> {
    let edges = map.edges();
    if map.is_blocked(center, tol.eps_geom) || edges.iter().any(|e| e.distance_to(center) <= tol.eps_geom) {
        return Err(RobotError::CenterInsideObstacle(center));
    }
    let mut shadows = Vec::new();
    let mut corners = Vec::new();
    // Slightly inflated so that a wall grazing the vision circle still casts a shadow.
    let reach = r + tol.eps_geom;
    for e in &edges {
        let Some(s) = clip_to_disc(*e, center, reach) else { continue };
        let (ta, tb) = ((s.a - center).angle(), (s.b - center).angle());
        let w = normalize_angle(tb - ta);
        let sector = if w <= PI {
            Sector { start: normalize_angle(ta), width: w }
        } else {
            Sector { start: normalize_angle(tb), width: TAU - w }
        };
        shadows.push(sector);
        corners.push(normalize_angle(ta));
        corners.push(normalize_angle(tb));
    }
    let touch = 1e-12;
    let closed = match merge_circular(shadows, touch) {
        None => vec![Sector { start: 0.0, width: TAU }],
        Some(m) => m.into_iter().filter(|s| s.width > touch).collect(),
    };

    let mut open = Vec::new();
    let full_closed = closed.len() == 1 && closed[0].width >= TAU - touch;
    if closed.is_empty() {
        split_gap(0.0, TAU, &mut open);
    } else if !full_closed {
        for i in 0..closed.len() {
            let from = closed[i].end();
            let to = if i + 1 < closed.len() { closed[i + 1].start } else { closed[0].start + TAU };
            let gap = to - from;
            if gap > tol.tol_angle {
                split_gap(normalize_angle(from), gap, &mut open);
            }
        }
    }

    let mut angles: Vec<f64> = open.iter().flat_map(|s: &Sector| [s.start, normalize_angle(s.end())]).collect();
    for s in &closed {
        if full_closed {
            break;
        }
        angles.push(s.start);
        angles.push(normalize_angle(s.end()));
    }
    angles.extend(corners);
    angles.sort_by(f64::total_cmp);
    angles.dedup_by(|a, b| (*a - *b).abs() <= touch);
    if angles.len() > 1 && TAU - angles[angles.len() - 1] + angles[0] <= touch {
        angles.pop();
    }
    let rays = angles
        .into_iter()
        .map(|angle| {
            let (_, end) = map.ray_contact(center, Point2::from_polar(1.0, angle), r);
            SightRay { angle, end }
        })
        .collect();
    let open_points = open
        .iter()
        .map(|s| OpenPoint {
            point: center + Point2::from_polar(r, s.mid()),
            rank: 0.0,
        })
        .collect();
    Ok(SightScan {
        center,
        radius: r,
        open_sights: open,
        closed_sights: closed,
        open_points,
        rays,
    })
}

fn split_gap(start: f64, width: f64, out: &mut Vec<Sector>) {
    let n = ((width / FRAC_PI_3) - 1e-9).ceil().max(1.0) as usize;
    let w = width / n as f64;
    for k in 0..n {
        out.push(Sector {
            start: normalize_angle(start + k as f64 * w),
            width: w,
        });
    }
}

/// `α/d + β/a`, with `d` the distance from `t` to the goal and `a` the angle at `center`
/// between `t` and the goal. Infinite when either factor vanishes.
pub fn rank_open_point(t: Point2, center: Point2, goal: Point2, alpha: f64, beta: f64) -> f64 {
    let d = t.dist(goal);
    let a = angle_between(t - center, goal - center, &Tolerances::default()).unwrap_or(0.0);
    if d == 0.0 || a == 0.0 {
        f64::INFINITY
    } else {
        alpha / d + beta / a
    }
}

impl SightScan {
    pub fn rank_points(&mut self, goal: Point2, alpha: f64, beta: f64) {
        for op in &mut self.open_points {
            op.rank = rank_open_point(op.point, self.center, goal, alpha, beta);
        }
    }

    /// Rays whose angle falls inside `sector`, ordered counterclockwise from its start.
    pub fn rays_in(&self, sector: &Sector, slack: f64) -> Vec<SightRay> {
        let mut v: Vec<SightRay> = self.rays.iter().copied().filter(|r| sector.contains(r.angle, slack)).collect();
        v.sort_by(|a, b| {
            let oa = sector.offset(a.angle);
            let ob = sector.offset(b.angle);
            let key = |o: f64| if o >= TAU - slack { o - TAU } else { o };
            key(oa).total_cmp(&key(ob))
        });
        v
    }

    /// Region seen through one closed sector: the fan of its rays.
    pub fn closed_region(&self, k: usize) -> SightRegion {
        let s = self.closed_sights[k];
        let ends: Vec<Point2> = self.rays_in(&s, 1e-12).into_iter().map(|r| r.end).collect();
        SightRegion::Fan {
            center: self.center,
            full: s.width >= TAU - 1e-12,
            ends,
        }
    }

    pub fn open_region(&self, k: usize) -> SightRegion {
        SightRegion::Wedge {
            center: self.center,
            radius: self.radius,
            sector: self.open_sights[k],
        }
    }

    /// How far the robot saw along direction `theta`.
    pub fn reach(&self, theta: f64) -> f64 {
        if self.open_sights.iter().any(|s| s.contains(theta, 0.0)) {
            return self.radius;
        }
        let dir = Point2::from_polar(1.0, theta);
        for k in 0..self.closed_sights.len() {
            let s = self.closed_sights[k];
            if !s.contains(theta, 0.0) {
                continue;
            }
            let rays = self.rays_in(&s, 1e-12);
            for w in rays.windows(2) {
                let (a, b) = (w[0].end - self.center, w[1].end - self.center);
                let f = b - a;
                let denom = dir.cross(f);
                if denom.abs() <= 1e-300 {
                    continue;
                }
                let u = a.cross(dir) / denom;
                let t = a.cross(f) / denom;
                if (-1e-9..=1.0 + 1e-9).contains(&u) && t >= 0.0 {
                    return t.min(self.radius);
                }
            }
        }
        self.radius
    }
}

/// A recorded sight, used to decide whether a new open point is already known.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SightRegion {
    Wedge { center: Point2, radius: f64, sector: Sector },
    /// Star-shaped fan `center, ends...`; when `full`, the ends alone close the loop.
    Fan { center: Point2, full: bool, ends: Vec<Point2> },
}

impl SightRegion {
    /// Closed membership test: points within `eps` of the region count as inside.
    pub fn contains(&self, p: Point2, eps: f64) -> bool {
        match self {
            SightRegion::Wedge { center, radius, sector } => {
                let d = p.dist(*center);
                if d <= eps {
                    return true;
                }
                d <= radius + eps && sector.contains((p - *center).angle(), eps / d)
            }
            SightRegion::Fan { center, full, ends } => {
                let mut poly = Vec::with_capacity(ends.len() + 1);
                if !full {
                    poly.push(*center);
                }
                poly.extend_from_slice(ends);
                if poly.len() < 3 {
                    return poly.windows(2).any(|w| Segment::new(w[0], w[1]).distance_to(p) <= eps)
                        || p.dist(*center) <= eps;
                }
                let n = poly.len();
                point_in_polygon(&poly, p) || (0..n).any(|i| Segment::new(poly[i], poly[(i + 1) % n]).distance_to(p) <= eps)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::pt;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn empty_map_six_sectors() {
        let s = compute_sights(&WorldMap::default(), pt(0., 0.), 2.0, &tol()).unwrap();
        assert_eq!(s.open_sights.len(), 6);
        assert!(s.closed_sights.is_empty());
        for (sec, op) in s.open_sights.iter().zip(&s.open_points) {
            assert!((sec.width - FRAC_PI_3).abs() < 1e-12);
            assert!((op.point.norm() - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn wall_south_matches_ray_casting() {
        let m = WorldMap::new(vec![vec![pt(-10., -1.), pt(10., -1.), pt(10., -3.), pt(-10., -3.)]], None);
        let s = compute_sights(&m, pt(0., 0.), 2.0, &tol()).unwrap();
        assert_eq!(s.closed_sights.len(), 1);
        let c = s.closed_sights[0];
        // The wall at distance 1 is visible from 210° to 330°; the other 240° split in four.
        assert!((c.start - 7.0 * PI / 6.0).abs() < 1e-8);
        assert!((c.width - 2.0 * PI / 3.0).abs() < 1e-8);
        assert_eq!(s.open_sights.len(), 4);
        let total: f64 = s.open_sights.iter().chain(&s.closed_sights).map(|x| x.width).sum();
        assert!((total - TAU).abs() < 1e-12);
        // Independent check: march along each whole-degree ray and look for a blocked sample.
        for deg in 0..360 {
            let th = (deg as f64).to_radians();
            let hits = (1..=400).any(|k| m.is_blocked(Point2::from_polar(2.0 * k as f64 / 400.0, th) + pt(0., -1e-6), 0.0));
            let near_edge = [c.start, c.end()].iter().any(|b| normalize_angle(th - b).min(normalize_angle(b - th)) < 1f64.to_radians());
            if !near_edge {
                assert_eq!(hits, c.contains(th, 0.0), "degree {deg}");
            }
        }
    }

    #[test]
    fn grazing_wall_keeps_open_points_off_it() {
        let m = WorldMap::new(vec![], Some([0., 0., 10., 10.]));
        let s = compute_sights(&m, pt(5., 2.), 2.0, &tol()).unwrap();
        assert_eq!(s.closed_sights.len(), 1);
        assert!(s.open_points.iter().all(|o| m.clearance(o.point) > 1e-6));
    }

    #[test]
    fn hemmed_in() {
        let ring = |r: f64| (0..12).map(move |k| Point2::from_polar(r, k as f64 * TAU / 12.0));
        let mut obs = Vec::new();
        // Thin blocks around the center, touching each other.
        let inner: Vec<Point2> = ring(1.0).collect();
        let outer: Vec<Point2> = ring(1.5).collect();
        for k in 0..12 {
            let j = (k + 1) % 12;
            obs.push(vec![inner[k], outer[k], outer[j], inner[j]]);
        }
        let m = WorldMap::new(obs, None);
        let s = compute_sights(&m, pt(0., 0.), 3.0, &tol()).unwrap();
        assert!(s.open_sights.is_empty());
        assert!(s.open_points.is_empty());
    }

    #[test]
    fn inside_obstacle_rejected() {
        let m = WorldMap::new(vec![vec![pt(-1., -1.), pt(1., -1.), pt(1., 1.), pt(-1., 1.)]], None);
        assert!(matches!(
            compute_sights(&m, pt(0., 0.), 2.0, &tol()),
            Err(RobotError::CenterInsideObstacle(_))
        ));
    }

    #[test]
    fn ranks() {
        let c = pt(0., 0.);
        assert_eq!(rank_open_point(pt(1., 0.), c, pt(1., 0.), 1., 1.), f64::INFINITY);
        assert_eq!(rank_open_point(pt(1., 0.), c, pt(3., 0.), 1., 1.), f64::INFINITY);
        // d = 2, a = 0.5.
        let rho = 0.5f64.cos() + (0.5f64.cos().powi(2) + 3.0).sqrt();
        let r = rank_open_point(Point2::from_polar(rho, 0.5), c, pt(1., 0.), 1., 1.);
        assert!((r - 2.5).abs() < 1e-12);
        // d = 1, a = π.
        let r = rank_open_point(pt(-0.5, 0.), c, pt(0.5, 0.), 1., 1.);
        assert!((r - (1.0 + 1.0 / PI)).abs() < 1e-12);
    }
}

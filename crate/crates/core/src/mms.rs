//! The multiple-shooting solver.
//!
//! The sequence is split into `K + 1` runs of bundles. One shooting point sits on the last
//! segment of each run, and the shortest path between consecutive shooting points comes from
//! the funnel sweep. Each sweep moves every shooting point that breaks the collinear condition
//! onto the shortest path joining the two neighbouring `t` points, which strictly shortens the
//! whole path. The loop stops once every junction is collinear.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bundles::{partition, BundleError, BundleSequence, CuttingSegment, Partition};
use crate::funnel::{portal_crossings, string_pull, Portal, PortalChain};
use crate::geometry::{
    angle_between, segment_intersection, GeometryError, Point2, PolylinePath, Segment,
    SegmentIntersection, Tolerances,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MmsError {
    #[error("junction {0} has a zero-length side")]
    DegenerateJunction(usize),
    #[error(transparent)]
    Bundle(#[from] BundleError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Shooting points, the cutting segments they live on, and the sub-paths joining them.
#[derive(Debug, Clone, PartialEq)]
pub struct ShootingState {
    pub cuts: Vec<CuttingSegment>,
    pub points: Vec<Point2>,
    pub subpaths: Vec<PolylinePath>,
    pub iteration: usize,
    pub total_length: f64,
    /// Portals each sub-path passes, excluding the cut at its end.
    portals: Vec<Vec<Portal>>,
    /// Arc length at which each sub-path first touches each of its portals.
    crossings: Vec<Vec<f64>>,
    tol: Tolerances,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConvergedBy {
    CollinearCondition,
    LengthTolerance,
    MaxIterations,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveLimits {
    pub max_iter: usize,
    pub tol_len: f64,
    /// Positional tolerance; also sets the width of the collinear band.
    pub eps_geom: f64,
    /// Record every junction's flag and candidate update for each sweep.
    pub audit: bool,
}

impl Default for SolveLimits {
    fn default() -> Self {
        let t = Tolerances::default();
        SolveLimits {
            max_iter: 10_000,
            tol_len: t.tol_len,
            eps_geom: t.eps_geom,
            audit: false,
        }
    }
}

/// One junction in one sweep, as seen before the sweep moved anything.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JunctionAudit {
    pub index: usize,
    pub collinear: bool,
    pub angle: Option<f64>,
    pub before: Point2,
    /// Where the update rule would send the point, whether or not it was applied.
    pub candidate: Point2,
    pub after: Point2,
    pub u: Point2,
    pub v: Point2,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MmsReport {
    pub path: PolylinePath,
    pub iterations: usize,
    pub converged_by: ConvergedBy,
    pub per_iteration_lengths: Vec<f64>,
    /// Set when some update found no intersection and used the nearest point instead.
    pub fallback_used: bool,
    /// Two consecutive points collapsed onto each other (rubber-band baseline only).
    pub degenerate: bool,
    pub audit: Vec<Vec<JunctionAudit>>,
    pub final_state: Option<ShootingState>,
}

struct Layout {
    partition: Partition,
    chain: PortalChain,
}

impl Layout {
    fn new(seq: &BundleSequence, k: usize, tol: &Tolerances) -> Result<Self, MmsError> {
        Ok(Layout {
            partition: partition(seq, k, tol)?,
            chain: PortalChain::build(seq, tol)?,
        })
    }

    /// Portals of each sub-path, the closing cut excluded.
    fn group_portals(&self) -> Vec<Vec<Portal>> {
        let cuts = &self.partition.cuts;
        let k = self.partition.k();
        (0..=k)
            .map(|i| {
                let from = if i == 0 { usize::MAX } else { cuts[i].source };
                let to = if i == k { usize::MAX } else { cuts[i + 1].source };
                let r = self.chain.range_between(from, to);
                let mut v = self.chain.portals[r].to_vec();
                if i < k {
                    v.pop();
                }
                v
            })
            .collect()
    }
}

impl ShootingState {
    fn with_points(
        cuts: Vec<CuttingSegment>,
        points: Vec<Point2>,
        portals: Vec<Vec<Portal>>,
        iteration: usize,
        tol: Tolerances,
    ) -> Self {
        let mut subpaths = Vec::with_capacity(portals.len());
        let mut crossings = Vec::with_capacity(portals.len());
        for (i, group) in portals.iter().enumerate() {
            let sp = string_pull(points[i], group, points[i + 1], &tol);
            crossings.push(portal_crossings(&sp, group, &tol).into_iter().map(|c| c.param).collect());
            subpaths.push(sp);
        }
        let total_length = subpaths.iter().map(PolylinePath::length).sum();
        ShootingState {
            cuts,
            points,
            subpaths,
            iteration,
            total_length,
            portals,
            crossings,
            tol,
        }
    }

    pub fn k(&self) -> usize {
        self.cuts.len() - 2
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tol
    }

    /// The whole path `p -> q`.
    pub fn path(&self) -> PolylinePath {
        let mut pts: Vec<Point2> = Vec::new();
        for sp in &self.subpaths {
            pts.extend_from_slice(sp.vertices());
        }
        PolylinePath::with_eps(pts, self.tol.eps_geom)
    }

    /// Nearest path vertex before shooting point `i` that is distinct from it.
    fn vertex_before(&self, i: usize) -> Option<Point2> {
        let s = self.points[i];
        self.subpaths[..i]
            .iter()
            .rev()
            .flat_map(|sp| sp.vertices().iter().rev())
            .find(|w| !w.approx_eq(s, self.tol.eps_geom))
            .copied()
    }

    fn vertex_after(&self, i: usize) -> Option<Point2> {
        let s = self.points[i];
        self.subpaths[i..]
            .iter()
            .flat_map(|sp| sp.vertices().iter())
            .find(|w| !w.approx_eq(s, self.tol.eps_geom))
            .copied()
    }
}

pub fn initial_state(seq: &BundleSequence, k: usize, tol: &Tolerances) -> Result<ShootingState, MmsError> {
    let layout = Layout::new(seq, k, tol)?;
    let cuts = layout.partition.cuts.clone();
    let points = cuts.iter().map(|c| c.v).collect();
    Ok(ShootingState::with_points(cuts, points, layout.group_portals(), 0, *tol))
}

/// Total angle at junction `i`, measured on the side facing away from `u`.
pub fn junction_angle(state: &ShootingState, i: usize) -> Result<f64, MmsError> {
    junction_geometry(state, i).map(|(a, _)| a)
}

/// The junction angle together with its rate of change per unit displacement of `s_i` along
/// the cut.
fn junction_geometry(state: &ShootingState, i: usize) -> Result<(f64, f64), MmsError> {
    let tol = &state.tol;
    let cut = &state.cuts[i];
    let s = state.points[i];
    let w = state.vertex_before(i).ok_or(MmsError::DegenerateJunction(i))?;
    let w2 = state.vertex_after(i).ok_or(MmsError::DegenerateJunction(i))?;
    let r = cut.u + (cut.u - cut.v);
    let a1 = angle_between(s - w, r - s, tol).map_err(|_| MmsError::DegenerateJunction(i))?;
    let a2 = angle_between(s - r, w2 - s, tol).map_err(|_| MmsError::DegenerateJunction(i))?;
    // The update pivots the path about the nearest bend on each side, or about the midpoint
    // when the neighbouring sub-path is a single segment.
    let pivot = |sp: &PolylinePath, fallback: Point2| match sp.vertices() {
        [a, b] => a.midpoint(*b),
        _ => fallback,
    };
    let before = pivot(&state.subpaths[i - 1], w);
    let after = pivot(&state.subpaths[i], w2);
    let e = cut.u - cut.v;
    let e = e * (1.0 / e.norm());
    let rate = |d: Point2| {
        let n2 = d.dot(d);
        if n2 > 0.0 { e.cross(d).abs() / n2 } else { 0.0 }
    };
    Ok((a1 + a2, rate(s - before) + rate(after - s)))
}

/// Smallest band, covering rounding in the angle computation itself.
const ANGLE_NOISE: f64 = 1e-14;

/// The collinear condition, read against a band around `pi`. The band is the angle change that
/// a shift of `eps_geom` along the cut would cause, so a junction counts as collinear exactly
/// when its point sits within `eps_geom` of where the bend vanishes. A fixed angular band cannot
/// do this: the displacement per radian differs from one junction to the next.
pub fn check_collinear(state: &ShootingState, i: usize) -> bool {
    collinear_with_angle(state, i).0
}

fn collinear_with_angle(state: &ShootingState, i: usize) -> (bool, Option<f64>) {
    let tol = &state.tol;
    let cut = &state.cuts[i];
    if cut.is_singleton(tol.eps_geom) {
        return (true, None);
    }
    let (angle, rate) = match junction_geometry(state, i) {
        Ok(g) => g,
        // A junction with nothing on one side has no bend to straighten.
        Err(_) => return (true, None),
    };
    let band = (rate * tol.eps_geom).max(ANGLE_NOISE);
    let pi = std::f64::consts::PI;
    let s = state.points[i];
    let ok = if s.approx_eq(cut.u, tol.eps_geom) {
        angle >= pi - band
    } else if s.approx_eq(cut.v, tol.eps_geom) {
        angle <= pi + band
    } else {
        (angle - pi).abs() <= band
    };
    (ok, Some(angle))
}

/// A `t` point on every sub-path, with its arc length along that sub-path.
pub fn pick_t_points(state: &ShootingState) -> Vec<Point2> {
    pick_t_points_with_params(state).into_iter().map(|(t, _)| t).collect()
}

fn pick_t_points_with_params(state: &ShootingState) -> Vec<(Point2, f64)> {
    state.subpaths.iter().map(pick_t).collect()
}

fn pick_t(sp: &PolylinePath) -> (Point2, f64) {
    let v = sp.vertices();
    match v.len() {
        1 => (v[0], 0.0),
        2 => (v[0].midpoint(v[1]), sp.length() / 2.0),
        _ => {
            let arcs = sp.arc_lengths();
            let mid = sp.length() / 2.0;
            let mut best = 1usize;
            for k in 2..v.len() - 1 {
                if (arcs[k] - mid).abs() < (arcs[best] - mid).abs() {
                    best = k;
                }
            }
            (v[best], arcs[best])
        }
    }
}

/// Portals `SP(t_{i-1}, t_i)` has to pass: those of sub-path `i - 1` beyond `t_{i-1}`, the
/// cut `i` itself, and those of sub-path `i` before `t_i`.
fn bridging_portals(state: &ShootingState, i: usize, lt_prev: f64, lt: f64) -> Vec<Portal> {
    let eps = state.tol.eps_geom;
    let mut out: Vec<Portal> = state.portals[i - 1]
        .iter()
        .zip(&state.crossings[i - 1])
        .filter(|(_, &c)| c > lt_prev + eps)
        .map(|(p, _)| *p)
        .collect();
    out.push(Portal::new(state.cuts[i].u, state.cuts[i].v));
    out.extend(
        state.portals[i]
            .iter()
            .zip(&state.crossings[i])
            .filter(|(_, &c)| c < lt - eps)
            .map(|(p, _)| *p),
    );
    out
}

/// Where the shortest path between `t_prev` and `t_i` meets cut `i`.
pub fn update_shooting_point(state: &ShootingState, i: usize, t_prev: Point2, t_i: Point2) -> Point2 {
    let lt_prev = param_of(&state.subpaths[i - 1], t_prev);
    let lt = param_of(&state.subpaths[i], t_i);
    update_with_params(state, i, t_prev, lt_prev, t_i, lt).0
}

fn param_of(sp: &PolylinePath, x: Point2) -> f64 {
    let v = sp.vertices();
    let arcs = sp.arc_lengths();
    let mut best = (f64::INFINITY, 0.0);
    for k in 0..v.len().saturating_sub(1) {
        let e = Segment::new(v[k], v[k + 1]);
        let c = e.closest_point(x);
        let d = c.dist(x);
        if d < best.0 {
            best = (d, arcs[k] + v[k].dist(c));
        }
    }
    best.1
}

/// Returns the new point and whether the nearest-point fallback was needed.
fn update_with_params(state: &ShootingState, i: usize, t_prev: Point2, lt_prev: f64, t_i: Point2, lt: f64) -> (Point2, bool) {
    let tol = &state.tol;
    let cut = state.cuts[i];
    if cut.is_singleton(tol.eps_geom) {
        return (cut.u, false);
    }
    let portals = bridging_portals(state, i, lt_prev, lt);
    let sp = string_pull(t_prev, &portals, t_i, tol);
    let cs = cut.segment();
    let mut best: Option<Point2> = None;
    let mut consider = |x: Point2| {
        if best.is_none_or(|b| x.dist(cut.u) < b.dist(cut.u)) {
            best = Some(x);
        }
    };
    if sp.len() == 1 && cs.contains(sp.vertices()[0], tol.eps_geom) {
        consider(cs.closest_point(sp.vertices()[0]));
    }
    for e in sp.edges() {
        match segment_intersection(e, cs, tol) {
            SegmentIntersection::Empty => {}
            SegmentIntersection::Point(x) => consider(cs.closest_point(x)),
            SegmentIntersection::Overlap(o) => {
                consider(o.a);
                consider(o.b);
            }
        }
    }
    match best {
        Some(x) => (x, false),
        None => (nearest_on_cut(&sp, cs), true),
    }
}

fn nearest_on_cut(sp: &PolylinePath, cut: Segment) -> Point2 {
    let mut best = (f64::INFINITY, cut.a);
    let mut take = |x: Point2, d: f64| {
        if d < best.0 {
            best = (d, x);
        }
    };
    for &v in sp.vertices() {
        let c = cut.closest_point(v);
        take(c, c.dist(v));
    }
    for e in sp.edges() {
        for end in [cut.a, cut.b] {
            take(end, e.distance_to(end));
        }
    }
    best.1
}

/// One sweep: every junction breaking the collinear condition moves, the rest stay put.
pub fn collinear_update(state: &ShootingState) -> (ShootingState, bool) {
    let (next, all, _, _) = sweep(state, false);
    (next, all)
}

fn sweep(state: &ShootingState, audit: bool) -> (ShootingState, bool, bool, Vec<JunctionAudit>) {
    let k = state.k();
    let ts = pick_t_points_with_params(state);
    let mut points = state.points.clone();
    let mut all = true;
    let mut fallback = false;
    let mut records = Vec::new();
    for i in 1..=k {
        let (ok, angle) = collinear_with_angle(state, i);
        let candidate = if !ok || audit {
            let (x, fb) = update_with_params(state, i, ts[i - 1].0, ts[i - 1].1, ts[i].0, ts[i].1);
            if !ok {
                fallback |= fb;
            }
            Some(x)
        } else {
            None
        };
        if !ok {
            all = false;
            points[i] = candidate.expect("computed when not collinear");
        }
        if audit {
            records.push(JunctionAudit {
                index: i,
                collinear: ok,
                angle,
                before: state.points[i],
                candidate: candidate.expect("computed under audit"),
                after: points[i],
                u: state.cuts[i].u,
                v: state.cuts[i].v,
            });
        }
    }
    if all {
        return (state.clone(), true, false, records);
    }
    let next = ShootingState::with_points(
        state.cuts.clone(),
        points,
        state.portals.clone(),
        state.iteration + 1,
        state.tol,
    );
    (next, false, fallback, records)
}

/// Runs sweeps until every junction is collinear or one of the limits kicks in.
pub fn solve(seq: &BundleSequence, k: usize, limits: &SolveLimits) -> Result<MmsReport, MmsError> {
    let tol = Tolerances {
        eps_geom: limits.eps_geom,
        tol_len: limits.tol_len,
        ..Tolerances::default()
    };
    let mut state = initial_state(seq, k, &tol)?;
    let mut lengths = vec![state.total_length];
    let mut audit = Vec::new();
    let mut fallback_used = false;
    let mut converged_by = ConvergedBy::MaxIterations;
    for _ in 0..limits.max_iter {
        let (next, all, fb, rec) = sweep(&state, limits.audit);
        if limits.audit {
            audit.push(rec);
        }
        fallback_used |= fb;
        if all {
            converged_by = ConvergedBy::CollinearCondition;
            break;
        }
        let prev = state.total_length;
        state = next;
        lengths.push(state.total_length);
        if prev - state.total_length < limits.tol_len * prev {
            converged_by = ConvergedBy::LengthTolerance;
            break;
        }
    }
    Ok(MmsReport {
        path: state.path(),
        iterations: state.iteration,
        converged_by,
        per_iteration_lengths: lengths,
        fallback_used,
        degenerate: false,
        audit,
        final_state: Some(state),
    })
}

/// Moves the shooting points to the given positions (projected onto their cuts) and rebuilds
/// the sub-paths.
pub fn state_with_points(state: &ShootingState, points: &[Point2]) -> ShootingState {
    let pts = state
        .cuts
        .iter()
        .zip(points)
        .map(|(c, &x)| c.segment().closest_point(x))
        .collect();
    ShootingState::with_points(state.cuts.clone(), pts, state.portals.clone(), state.iteration, state.tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundles::Bundle;
    use crate::geometry::pt;
    use std::f64::consts::PI;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn manual_state(w: Point2, s: Point2, w2: Point2, u: Point2, v: Point2) -> ShootingState {
        let cuts = vec![
            CuttingSegment::singleton(w, 0),
            CuttingSegment { u, v, source: 1 },
            CuttingSegment::singleton(w2, 2),
        ];
        ShootingState::with_points(cuts, vec![w, s, w2], vec![vec![], vec![]], 0, tol())
    }

    #[test]
    fn junction_angle_straight() {
        let st = manual_state(pt(1., 0.), pt(2., 0.), pt(3., 0.), pt(2., 1.), pt(2., -1.));
        assert!((junction_angle(&st, 1).unwrap() - PI).abs() < 1e-15);
        assert!(check_collinear(&st, 1));
    }

    #[test]
    fn junction_angle_turn() {
        let st = manual_state(pt(1., 0.), pt(2., 0.), pt(2., 1.), pt(2., 1.), pt(2., -1.));
        assert!((junction_angle(&st, 1).unwrap() - 1.5 * PI).abs() < 1e-15);
    }

    #[test]
    fn collinear_at_cut_ends() {
        // Bends of 3pi/2 satisfy the condition only at u.
        let at_u = manual_state(pt(1., 1.), pt(2., 1.), pt(2., 2.), pt(2., 1.), pt(2., -1.));
        assert!((junction_angle(&at_u, 1).unwrap() - 1.5 * PI).abs() < 1e-15);
        assert!(check_collinear(&at_u, 1));
        let at_v = manual_state(pt(1., -1.), pt(2., -1.), pt(2., 0.), pt(2., 1.), pt(2., -1.));
        assert!((junction_angle(&at_v, 1).unwrap() - 1.5 * PI).abs() < 1e-15);
        assert!(!check_collinear(&at_v, 1));
    }

    #[test]
    fn singleton_cut_always_collinear() {
        let st = manual_state(pt(1., 0.), pt(2., 0.), pt(2., 5.), pt(2., 0.), pt(2., 0.));
        assert!(check_collinear(&st, 1));
    }

    #[test]
    fn t_points() {
        assert_eq!(pick_t(&PolylinePath::new([pt(0., 0.), pt(4., 0.)])).0, pt(2., 0.));
        assert_eq!(pick_t(&PolylinePath::new([pt(0., 0.), pt(2., 1.), pt(4., 0.)])).0, pt(2., 1.));
        let p = PolylinePath::new([pt(0., 0.), pt(1., 1.), pt(3., 1.), pt(4., 0.)]);
        assert_eq!(pick_t(&p).0, pt(1., 1.));
    }

    #[test]
    fn update_on_free_corridor() {
        let st = manual_state(pt(0., 0.), pt(2., -1.), pt(4., 0.), pt(2., 1.), pt(2., -1.));
        assert_eq!(update_shooting_point(&st, 1, pt(0., 0.), pt(4., 0.)), pt(2., 0.));
    }

    #[test]
    fn update_overlap_prefers_u() {
        let st = manual_state(pt(2., -3.), pt(2., -1.), pt(2., 3.), pt(2., 1.), pt(2., -1.));
        // The straight path between the t points runs along the cut.
        let x = update_shooting_point(&st, 1, pt(2., -0.5), pt(2., 0.5));
        assert_eq!(x, pt(2., 0.5));
    }

    fn straight_seq() -> BundleSequence {
        BundleSequence::new(
            pt(0., 0.),
            vec![
                Bundle::from_endpoints(pt(1., 0.), [pt(1., 1.)]),
                Bundle::from_endpoints(pt(2., 0.), [pt(2., 1.)]),
                Bundle::from_endpoints(pt(3., 0.), [pt(3., 1.)]),
            ],
            pt(4., 0.),
        )
    }

    #[test]
    fn straight_corridor_needs_no_sweep() {
        let st = initial_state(&straight_seq(), 2, &tol()).unwrap();
        assert_eq!(st.total_length, 4.0);
        let (_, all) = collinear_update(&st);
        assert!(all);
        let r = solve(&straight_seq(), 2, &SolveLimits::default()).unwrap();
        assert_eq!(r.iterations, 0);
        assert_eq!(r.converged_by, ConvergedBy::CollinearCondition);
        assert_eq!(r.path.length(), 4.0);
    }

    #[test]
    fn single_bundle_touching_spine() {
        let seq = BundleSequence::new(pt(0., 0.), vec![Bundle::from_endpoints(pt(2., 0.), [pt(2., 1.)])], pt(4., 0.));
        let r = solve(&seq, 1, &SolveLimits::default()).unwrap();
        assert_eq!(r.path.length(), 4.0);
    }

    #[test]
    fn finest_split_has_one_subpath_per_gap() {
        let st = initial_state(&straight_seq(), 3, &tol()).unwrap();
        assert_eq!(st.subpaths.len(), 4);
        assert_eq!(st.cuts.len(), 5);
    }

    #[test]
    fn bent_spine_shortens() {
        // Spine bends up through (2, 2); the bundles open towards the inside of the bend.
        let seq = BundleSequence::new(
            pt(0., 0.),
            vec![
                Bundle::from_endpoints(pt(1., 1.), [pt(1.8, 0.2)]),
                Bundle::from_endpoints(pt(2., 2.), [pt(2., -1.)]),
                Bundle::from_endpoints(pt(3., 1.), [pt(2.2, 0.2)]),
            ],
            pt(4., 0.),
        );
        let limits = SolveLimits {
            audit: true,
            ..SolveLimits::default()
        };
        let r = solve(&seq, 1, &limits).unwrap();
        let l = &r.per_iteration_lengths;
        assert!(l.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-10)));
        assert!(l.last().unwrap() < &l[0]);
        // Optimum wraps the far ends (1.8, 0.2) and (2.2, 0.2) of the outer bundles.
        let best = 2.0 * pt(1.8, 0.2).norm() + 0.4;
        assert!((r.path.length() - best).abs() < 1e-9, "{}", r.path.length());
    }
}

//! Exploring robot: vision-disc sights, the exploration graph, and a planner that returns to
//! earlier open points along a shortest path through bundles of sight segments.

mod graph;
mod map;
mod sights;

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use graph::{graph_shortest_path, ExplorationGraph, OpenMark};
pub use map::WorldMap;
pub use sights::{compute_sights, rank_open_point, OpenPoint, Sector, SightRay, SightRegion, SightScan};

use crate::bundles::{minor_sector_bisector, order_sequence, Bundle, BundleError, BundleSequence};
use crate::geometry::{ccw_angle, Point2, PolylinePath, Segment, Tolerances};
use crate::mms::{self, MmsReport, SolveLimits};
use crate::rubber_band::{rubber_band_solve, trim_bundles, DEFAULT_TRIM};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RobotError {
    #[error("position {0:?} is inside or on an obstacle")]
    CenterInsideObstacle(Point2),
    #[error("target is not connected in the exploration graph")]
    Unreachable,
    #[error("no path from start to goal")]
    NoPath,
    #[error("gave up after {0} steps")]
    StepLimit(usize),
    #[error(transparent)]
    Bundle(#[from] BundleError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Solver {
    Mms,
    RubberBand,
    GraphOnly,
}

/// How many cutting segments to use for a return through `N` interior bundles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KRule {
    FloorNOver5,
    Fixed(usize),
}

impl KRule {
    pub fn k_for(&self, n: usize) -> usize {
        match *self {
            KRule::FloorNOver5 => (n / 5).max(1),
            KRule::Fixed(k) => k.max(1),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlanParams {
    pub radius: f64,
    pub alpha: f64,
    pub beta: f64,
    pub k_rule: KRule,
    pub solver: Solver,
    pub limits: SolveLimits,
    pub tol: Tolerances,
    /// Upper bound on the number of scans.
    pub max_steps: usize,
}

impl Default for PlanParams {
    fn default() -> Self {
        PlanParams {
            radius: 10.0,
            alpha: 1.0,
            beta: 1.0,
            k_rule: KRule::FloorNOver5,
            solver: Solver::Mms,
            limits: SolveLimits::default(),
            tol: Tolerances::default(),
            max_steps: 5_000,
        }
    }
}

/// One move to an open point outside the current vision disc.
#[derive(Debug, Clone)]
pub struct ReturnRecord {
    pub tau_hat: PolylinePath,
    /// Bundles after clipping; empty when the route had no interior vertex.
    pub bundles: BundleSequence,
    pub n: usize,
    pub k: usize,
    pub min_sector_angle: f64,
    pub report: Option<MmsReport>,
    /// The path actually driven.
    pub path: PolylinePath,
    pub tau_length: f64,
    pub solver_length: f64,
    pub solve_time: Duration,
    /// Solver failure that made the robot fall back to the graph route.
    pub error: Option<String>,
}

impl ReturnRecord {
    pub fn ratio(&self) -> f64 {
        if self.tau_length > 0.0 {
            self.solver_length / self.tau_length
        } else {
            1.0
        }
    }
}

#[derive(Debug, Clone)]
pub struct PlanTrace {
    /// Every position the robot passed through, in order.
    pub path: PolylinePath,
    pub returns: Vec<ReturnRecord>,
    pub scans: usize,
    pub graph: ExplorationGraph,
}

impl PlanTrace {
    pub fn total_length(&self) -> f64 {
        self.path.length()
    }
}

/// Interior bundles along the graph route `nodes`: at each visited center, the sight segments
/// strictly inside the minor sector between the two route edges. A center with none gets one
/// fake segment along the sector's bisector, as long as the robot saw in that direction.
pub fn build_bundle_sequence(g: &ExplorationGraph, nodes: &[usize], tol: &Tolerances) -> Result<BundleSequence, RobotError> {
    let pts: Vec<Point2> = nodes.iter().map(|&i| g.nodes[i]).collect();
    let n = pts.len();
    let mut interior = Vec::with_capacity(n.saturating_sub(2));
    for i in 1..n.saturating_sub(1) {
        let (prev, v, next) = (pts[i - 1], pts[i], pts[i + 1]);
        let (bis, angle) = minor_sector_bisector(prev, v, next, tol);
        let to_prev = prev - v;
        let span = ccw_angle(to_prev, next - v);
        let ccw_side = ccw_angle(to_prev, bis) < span;
        let band = tol.tol_angle;
        let inside = |d: Point2| {
            let a = ccw_angle(to_prev, d);
            if ccw_side {
                a > band && a < span - band
            } else {
                a > span + band && a < std::f64::consts::TAU - band
            }
        };
        let mut bundle = Bundle::point(v);
        bundle.sector_angle = angle;
        if let Some(scan) = g.scans.get(&nodes[i]) {
            let ends = scan.rays.iter().map(|r| r.end).chain(scan.open_points.iter().map(|o| o.point));
            for e in ends {
                if e.dist(v) > tol.eps_geom && inside(e - v) {
                    bundle.segments.push(Segment::new(v, e));
                }
            }
            if bundle.segments.is_empty() {
                let reach = scan.reach(bis.angle());
                bundle.segments.push(Segment::new(v, v + bis * reach));
            }
        }
        interior.push(bundle);
    }
    let seq = BundleSequence::new(pts[0], interior, pts[n - 1]);
    Ok(order_sequence(&seq, tol)?)
}

/// Half the smallest distance between two bundle vertices.
pub fn preprocess_radius(seq: &BundleSequence) -> f64 {
    let v: Vec<Point2> = seq.bundles.iter().map(|b| b.vertex).collect();
    let mut m = f64::INFINITY;
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            m = m.min(v[i].dist(v[j]));
        }
    }
    0.5 * m
}

/// Clips every segment to the disc of radius [`preprocess_radius`] around its vertex.
pub fn preprocess(seq: &BundleSequence) -> BundleSequence {
    let r0 = preprocess_radius(seq);
    let mut out = seq.clone();
    for b in &mut out.bundles {
        for s in &mut b.segments {
            let len = s.length();
            if len > r0 {
                s.b = s.a + (s.b - s.a) * (r0 / len);
            }
        }
    }
    out
}

struct Planner<'a> {
    map: &'a WorldMap,
    goal: Point2,
    params: PlanParams,
    graph: ExplorationGraph,
    path: Vec<Point2>,
    returns: Vec<ReturnRecord>,
    scans: usize,
}

impl Planner<'_> {
    fn drive(&mut self, pts: &[Point2]) {
        self.path.extend(pts.iter().skip(1).copied());
    }

    fn scan(&mut self, at: Point2) -> Result<(), RobotError> {
        let mut scan = compute_sights(self.map, at, self.params.radius, &self.params.tol)?;
        scan.rank_points(self.goal, self.params.alpha, self.params.beta);
        self.graph.absorb_scan(&scan);
        self.scans += 1;
        Ok(())
    }

    /// Moves from node `a` to node `b` along the graph route, shortened by the chosen solver.
    fn go_around(&mut self, a: usize, b: usize) -> Result<(), RobotError> {
        let nodes = self.graph.shortest_nodes(a, b)?;
        let tau_hat = PolylinePath::with_eps(nodes.iter().map(|&i| self.graph.nodes[i]), 0.0);
        if nodes.len() <= 2 {
            self.drive(tau_hat.vertices());
            return Ok(());
        }
        let tol = self.params.tol;
        let seq = preprocess(&build_bundle_sequence(&self.graph, &nodes, &tol)?);
        let n = seq.interior_count();
        let k = self.params.k_rule.k_for(n);
        let min_sector_angle = seq.bundles[1..=n].iter().map(|b| b.sector_angle).fold(f64::INFINITY, f64::min);
        let started = Instant::now();
        let (report, error) = match self.params.solver {
            Solver::GraphOnly => (None, None),
            Solver::Mms => match mms::solve(&seq, k, &self.params.limits) {
                Ok(r) => (Some(r), None),
                Err(e) => (None, Some(e.to_string())),
            },
            Solver::RubberBand => {
                let shortest = seq.segments().iter().map(Segment::length).fold(f64::INFINITY, f64::min);
                let eps = (DEFAULT_TRIM * seq.diameter().max(1.0)).min(0.1 * shortest);
                match trim_bundles(&seq, eps, &tol) {
                    Ok(segs) => (Some(rubber_band_solve(&segs, seq.p(), seq.q(), &self.params.limits)), None),
                    Err(e) => (None, Some(e.to_string())),
                }
            }
        };
        let solve_time = started.elapsed();
        let path = report.as_ref().map_or_else(|| tau_hat.clone(), |r| r.path.clone());
        self.drive(path.vertices());
        self.returns.push(ReturnRecord {
            tau_length: tau_hat.length(),
            solver_length: path.length(),
            tau_hat,
            bundles: seq,
            n,
            k,
            min_sector_angle,
            report,
            path,
            solve_time,
            error,
        });
        Ok(())
    }
}

/// Explores from `start` until the goal is reached.
///
/// Each step scans, records the scan, and heads for the best-ranked open point. A target in
/// plain view is driven to in a straight line; anything else is reached along the graph route,
/// shortened through the bundles of sight segments it passes.
pub fn plan(map: &WorldMap, start: Point2, goal: Point2, params: &PlanParams) -> Result<PlanTrace, RobotError> {
    let eps = params.tol.eps_geom;
    let mut pl = Planner {
        map,
        goal,
        params: *params,
        graph: ExplorationGraph::new(eps),
        path: vec![start],
        returns: Vec::new(),
        scans: 0,
    };
    let mut a = pl.graph.shared_node(start);
    for _ in 0..params.max_steps {
        let here = pl.graph.nodes[a];
        if here.approx_eq(goal, eps) {
            return Ok(PlanTrace {
                path: PolylinePath::with_eps(pl.path, 0.0),
                returns: pl.returns,
                scans: pl.scans,
                graph: pl.graph,
            });
        }
        pl.scan(here)?;
        let in_view = |p: Point2| p.dist(here) <= params.radius && map.segment_is_free(Segment::new(here, p), eps);
        let next = if in_view(goal) {
            let g = pl.graph.shared_node(goal);
            pl.graph.marked_open.retain(|m| m.node != g);
            g
        } else {
            match pl.graph.best_open() {
                None => return Err(RobotError::NoPath),
                Some(i) => pl.graph.take_open(i).node,
            }
        };
        let target = pl.graph.nodes[next];
        if in_view(target) {
            pl.graph.add_edge(a, next);
            pl.drive(&[here, target]);
        } else {
            pl.go_around(a, next)?;
        }
        a = next;
    }
    Err(RobotError::StepLimit(params.max_steps))
}

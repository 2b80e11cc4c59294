//! File formats: JSON maps, instances and scenarios, CSV reports and SVG renders.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bundles::{Bundle, BundleSequence};
use crate::geometry::{polygon_signed_area, Point2, PolylinePath, Tolerances};
use crate::instances::{seeded_sequences, InstanceParams};
use crate::mms::{self, SolveLimits};
use crate::oracle::{dp_refined, DiscretizedInstance, DEFAULT_SAMPLES};
use crate::rubber_band::{rubber_band_solve, trim_bundles, DEFAULT_TRIM};
use crate::robot::{plan, KRule, PlanParams, PlanTrace, RobotError, Solver, WorldMap};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("obstacle {0} is not a simple polygon")]
    NonSimplePolygon(usize),
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error(transparent)]
    Robot(#[from] RobotError),
}

impl From<serde_json::Error> for IoError {
    fn from(e: serde_json::Error) -> Self {
        IoError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }
}

fn read(path: &Path) -> Result<String, IoError> {
    std::fs::read_to_string(path).map_err(|source| IoError::Read {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), IoError> {
    std::fs::write(path, contents).map_err(|source| IoError::Write {
        path: path.to_path_buf(),
        source,
    })
}

fn xy(p: [f64; 2]) -> Point2 {
    Point2::new(p[0], p[1])
}

#[derive(Deserialize)]
struct RawMap {
    obstacles: Vec<Vec<[f64; 2]>>,
    #[serde(default)]
    bounds: Option<[f64; 4]>,
}

/// Parses a map; obstacles given clockwise are turned around.
pub fn parse_map(text: &str) -> Result<WorldMap, IoError> {
    let raw: RawMap = serde_json::from_str(text)?;
    let mut obstacles: Vec<Vec<Point2>> = raw.obstacles.into_iter().map(|p| p.into_iter().map(xy).collect()).collect();
    for poly in &mut obstacles {
        if polygon_signed_area(poly) < 0.0 {
            poly.reverse();
        }
    }
    let map = WorldMap::new(obstacles, raw.bounds);
    if let Some(i) = map.first_non_simple(&Tolerances::default()) {
        return Err(IoError::NonSimplePolygon(i));
    }
    Ok(map)
}

pub fn load_map(path: &Path) -> Result<WorldMap, IoError> {
    parse_map(&read(path)?)
}

#[derive(Serialize, Deserialize)]
struct RawBundle {
    vertex: [f64; 2],
    segments: Vec<[f64; 2]>,
}

#[derive(Serialize, Deserialize)]
struct RawInstance {
    p: [f64; 2],
    q: [f64; 2],
    bundles: Vec<RawBundle>,
}

/// Parses an instance: endpoints plus interior bundles as vertex and far endpoints, in order.
pub fn parse_instance(text: &str) -> Result<BundleSequence, IoError> {
    let raw: RawInstance = serde_json::from_str(text)?;
    let interior = raw
        .bundles
        .into_iter()
        .map(|b| Bundle::from_endpoints(xy(b.vertex), b.segments.into_iter().map(xy)))
        .collect();
    Ok(BundleSequence::new(xy(raw.p), interior, xy(raw.q)))
}

pub fn load_instance(path: &Path) -> Result<BundleSequence, IoError> {
    parse_instance(&read(path)?)
}

pub fn instance_to_json(seq: &BundleSequence) -> String {
    let n = seq.bundles.len();
    let raw = RawInstance {
        p: [seq.p().x, seq.p().y],
        q: [seq.q().x, seq.q().y],
        bundles: seq.bundles[1..n - 1]
            .iter()
            .map(|b| RawBundle {
                vertex: [b.vertex.x, b.vertex.y],
                segments: b.segments.iter().map(|s| [s.b.x, s.b.y]).collect(),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&raw).expect("instance serializes")
}

/// Everything needed to reproduce one planning run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub map_path: PathBuf,
    pub start: [f64; 2],
    pub goal: [f64; 2],
    pub radius: f64,
    #[serde(default = "one")]
    pub alpha: f64,
    #[serde(default = "one")]
    pub beta: f64,
    #[serde(default = "floor_rule")]
    pub k_rule: KRule,
    #[serde(default = "mms_solver")]
    pub solver: Solver,
    #[serde(default)]
    pub limits: Option<SolveLimits>,
    #[serde(default)]
    pub seed: u64,
}

fn one() -> f64 {
    1.0
}

fn floor_rule() -> KRule {
    KRule::FloorNOver5
}

fn mms_solver() -> Solver {
    Solver::Mms
}

impl Scenario {
    pub fn validate(&self) -> Result<(), IoError> {
        if !(self.radius > 0.0) {
            return Err(IoError::InvalidScenario("radius must be positive".into()));
        }
        if self.start == self.goal {
            return Err(IoError::InvalidScenario("start equals goal".into()));
        }
        Ok(())
    }

    pub fn params(&self) -> PlanParams {
        PlanParams {
            radius: self.radius,
            alpha: self.alpha,
            beta: self.beta,
            k_rule: self.k_rule,
            solver: self.solver,
            limits: self.limits.unwrap_or_default(),
            ..PlanParams::default()
        }
    }
}

/// Scenario file; a relative `map_path` is resolved against the scenario's directory.
pub fn load_scenario(path: &Path) -> Result<Scenario, IoError> {
    let mut s: Scenario = serde_json::from_str(&read(path)?)?;
    if s.map_path.is_relative() {
        if let Some(dir) = path.parent() {
            s.map_path = dir.join(&s.map_path);
        }
    }
    s.validate()?;
    Ok(s)
}

/// The scenario's own run, plus the same run driven along plain graph routes for reference.
pub struct PlanOutcome {
    pub trace: PlanTrace,
    pub baseline: PlanTrace,
}

pub fn run_plan(scenario: &Scenario, map: &WorldMap) -> Result<PlanOutcome, IoError> {
    scenario.validate()?;
    let params = scenario.params();
    let (s, g) = (xy(scenario.start), xy(scenario.goal));
    let trace = plan(map, s, g, &params)?;
    let baseline = plan(map, s, g, &PlanParams { solver: Solver::GraphOnly, ..params })?;
    Ok(PlanOutcome { trace, baseline })
}

/// One row per return event, then totals. Timing goes in the last column and is left out
/// entirely when `timing` is false, so reruns can be compared byte for byte.
pub fn plan_csv(outcome: &PlanOutcome, timing: bool) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["event", "n", "k", "tau_length", "solver_length", "iterations", "converged_by"];
    if timing {
        header.push("wall_time_s");
    }
    w.write_record(&header).expect("in-memory write");
    let mut solve_time = 0.0;
    for (i, r) in outcome.trace.returns.iter().enumerate() {
        let (iters, conv) = match &r.report {
            Some(rep) => (rep.iterations.to_string(), format!("{:?}", rep.converged_by)),
            None => (String::new(), r.error.clone().unwrap_or_else(|| "graph".into())),
        };
        let mut row = vec![
            i.to_string(),
            r.n.to_string(),
            r.k.to_string(),
            r.tau_length.to_string(),
            r.solver_length.to_string(),
            iters,
            conv,
        ];
        let t = r.solve_time.as_secs_f64();
        solve_time += t;
        if timing {
            row.push(t.to_string());
        }
        w.write_record(&row).expect("in-memory write");
    }
    let base = outcome.baseline.total_length();
    let ours = outcome.trace.total_length();
    let mut total = vec!["total".to_string(), String::new(), String::new(), base.to_string(), ours.to_string(), String::new(), String::new()];
    if timing {
        total.push(solve_time.to_string());
    }
    w.write_record(&total).expect("in-memory write");
    let pct = if base > 0.0 { 100.0 * (base - ours) / base } else { 0.0 };
    let mut red = vec!["reduction_pct".to_string(), String::new(), String::new(), String::new(), pct.to_string(), String::new(), String::new()];
    if timing {
        red.push(String::new());
    }
    w.write_record(&red).expect("in-memory write");
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii output")
}

/// One random instance solved by every method.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub id: usize,
    pub n: usize,
    pub segments: usize,
    pub k: usize,
    pub mms_length: f64,
    pub mms_iterations: usize,
    pub rb_length: f64,
    pub rb_iterations: usize,
    pub oracle_length: Option<f64>,
    pub mms_time: f64,
    pub rb_time: f64,
}

fn bench_one(id: usize, seq: &BundleSequence, limits: &SolveLimits, oracle: bool) -> Result<BenchRow, IoError> {
    let n = seq.interior_count();
    let k = KRule::FloorNOver5.k_for(n);
    let t = Instant::now();
    let m = mms::solve(seq, k, limits).map_err(|e| IoError::InvalidScenario(format!("instance {id}: {e}")))?;
    let mms_time = t.elapsed().as_secs_f64();
    let tol = Tolerances::default();
    let t = Instant::now();
    let segs = trim_bundles(seq, DEFAULT_TRIM * seq.diameter().max(1.0), &tol)
        .map_err(|e| IoError::InvalidScenario(format!("instance {id}: {e}")))?;
    let rb = rubber_band_solve(&segs, seq.p(), seq.q(), limits);
    let rb_time = t.elapsed().as_secs_f64();
    let oracle_length = if oracle {
        let inst = DiscretizedInstance::from_sequence(seq, DEFAULT_SAMPLES);
        Some(dp_refined(&inst, 4).expect("every layer is sampled").length())
    } else {
        None
    };
    Ok(BenchRow {
        id,
        n,
        segments: seq.segments().len(),
        k,
        mms_length: m.path.length(),
        mms_iterations: m.iterations,
        rb_length: rb.path.length(),
        rb_iterations: rb.iterations,
        oracle_length,
        mms_time,
        rb_time,
    })
}

/// Solves `count` seeded random instances on `threads` workers; rows come back sorted by id.
pub fn bench(seed: u64, count: usize, limits: &SolveLimits, oracle: bool, threads: usize) -> Result<Vec<BenchRow>, IoError> {
    let seqs = seeded_sequences(seed, count, &InstanceParams::default());
    let threads = threads.max(1);
    let mut rows: Vec<Result<BenchRow, IoError>> = std::thread::scope(|sc| {
        let handles: Vec<_> = (0..threads)
            .map(|w| {
                let seqs = &seqs;
                sc.spawn(move || {
                    (w..seqs.len())
                        .step_by(threads)
                        .map(|i| bench_one(i, &seqs[i], limits, oracle))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("bench worker panicked")).collect()
    });
    rows.sort_by_key(|r| match r {
        Ok(row) => row.id,
        Err(_) => usize::MAX,
    });
    rows.into_iter().collect()
}

pub fn bench_csv(rows: &[BenchRow], timing: bool) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec![
        "id", "n", "segments", "k", "mms_length", "mms_iterations", "rb_length", "rb_iterations", "oracle_length",
    ];
    if timing {
        header.extend(["mms_time_s", "rb_time_s"]);
    }
    w.write_record(&header).expect("in-memory write");
    for r in rows {
        let mut rec = vec![
            r.id.to_string(),
            r.n.to_string(),
            r.segments.to_string(),
            r.k.to_string(),
            r.mms_length.to_string(),
            r.mms_iterations.to_string(),
            r.rb_length.to_string(),
            r.rb_iterations.to_string(),
            r.oracle_length.map_or_else(String::new, |x| x.to_string()),
        ];
        if timing {
            rec.extend([r.mms_time.to_string(), r.rb_time.to_string()]);
        }
        w.write_record(&rec).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii output")
}

struct Svg {
    body: String,
    min: Point2,
    max: Point2,
}

impl Svg {
    fn new() -> Self {
        Svg {
            body: String::new(),
            min: Point2::new(f64::INFINITY, f64::INFINITY),
            max: Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY),
        }
    }

    fn grow(&mut self, pts: &[Point2]) {
        for p in pts {
            self.min = Point2::new(self.min.x.min(p.x), self.min.y.min(p.y));
            self.max = Point2::new(self.max.x.max(p.x), self.max.y.max(p.y));
        }
    }

    fn coords(pts: &[Point2]) -> String {
        pts.iter().map(|p| format!("{},{}", p.x, -p.y)).collect::<Vec<_>>().join(" ")
    }

    fn polygon(&mut self, pts: &[Point2], style: &str) {
        self.grow(pts);
        let _ = writeln!(self.body, r#"  <polygon points="{}" style="{}"/>"#, Self::coords(pts), style);
    }

    fn polyline(&mut self, pts: &[Point2], style: &str) {
        self.grow(pts);
        let _ = writeln!(self.body, r#"  <polyline points="{}" style="fill:none;{}"/>"#, Self::coords(pts), style);
    }

    fn dot(&mut self, p: Point2, r: f64, fill: &str) {
        self.grow(&[p]);
        let _ = writeln!(self.body, r#"  <circle cx="{}" cy="{}" r="{}" fill="{}"/>"#, p.x, -p.y, r, fill);
    }

    fn group(&mut self, id: &str) {
        let _ = writeln!(self.body, r#" <g id="{id}">"#);
    }

    fn end_group(&mut self) {
        self.body.push_str(" </g>\n");
    }

    fn finish(self) -> String {
        let pad = 0.05 * (self.max - self.min).norm().max(1.0);
        let (x, y) = (self.min.x - pad, -self.max.y - pad);
        let (w, h) = (self.max.x - self.min.x + 2.0 * pad, self.max.y - self.min.y + 2.0 * pad);
        format!(
            "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\"{x} {y} {w} {h}\">\n{}</svg>\n",
            self.body
        )
    }
}

fn stroke(color: &str, width: f64) -> String {
    format!("stroke:{color};stroke-width:{width}")
}

/// Bundles in grey, the spine dashed, and `path` on top.
pub fn render_instance_svg(seq: &BundleSequence, path: &PolylinePath) -> String {
    let mut svg = Svg::new();
    let w = 0.004 * seq.diameter().max(1.0);
    svg.group("bundles");
    for s in seq.segments() {
        svg.polyline(&[s.a, s.b], &stroke("#888", w));
    }
    svg.end_group();
    svg.group("spine");
    svg.polyline(seq.tau.vertices(), &format!("{};stroke-dasharray:{},{}", stroke("#4a90d9", w), 4.0 * w, 2.0 * w));
    svg.end_group();
    svg.group("path");
    svg.polyline(path.vertices(), &stroke("#d0021b", 1.5 * w));
    svg.dot(seq.p(), 2.0 * w, "#000");
    svg.dot(seq.q(), 2.0 * w, "#000");
    svg.end_group();
    svg.finish()
}

/// Obstacles, the driven path, and every return's graph route and bundles.
pub fn render_plan_svg(map: &WorldMap, trace: &PlanTrace) -> String {
    let mut svg = Svg::new();
    let mut w = 0.1;
    if let Some([x0, y0, x1, y1]) = map.bounds {
        let r = [Point2::new(x0, y0), Point2::new(x1, y0), Point2::new(x1, y1), Point2::new(x0, y1)];
        svg.polygon(&r, "fill:none;stroke:#000;stroke-width:0.3");
        w = 0.002 * (x1 - x0).max(y1 - y0);
    }
    svg.group("obstacles");
    for poly in &map.obstacles {
        svg.polygon(poly, "fill:#c8c8c8;stroke:#555;stroke-width:0.2");
    }
    svg.end_group();
    svg.group("returns");
    for r in &trace.returns {
        svg.polyline(r.tau_hat.vertices(), &format!("{};stroke-dasharray:1,0.5", stroke("#4a90d9", w)));
        for s in r.bundles.segments() {
            svg.polyline(&[s.a, s.b], &stroke("#2e8b57", w));
        }
    }
    svg.end_group();
    svg.group("path");
    svg.polyline(trace.path.vertices(), &stroke("#d0021b", 2.0 * w));
    if let (Some(s), Some(g)) = (trace.path.first(), trace.path.last()) {
        svg.dot(s, 4.0 * w, "#000");
        svg.dot(g, 4.0 * w, "#f5a623");
    }
    svg.end_group();
    svg.finish()
}

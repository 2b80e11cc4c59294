use std::f64::consts::{FRAC_PI_3, PI, TAU};
use std::path::PathBuf;

use bundlepath::io::{load_map, load_scenario};
use bundlepath::robot::{
    build_bundle_sequence, compute_sights, plan, ExplorationGraph, PlanParams, Solver, WorldMap,
};
use bundlepath::{pt, Point2, Tolerances};
use proptest::prelude::*;

fn tol() -> Tolerances {
    Tolerances::default()
}

fn rect(x0: f64, y0: f64, x1: f64, y1: f64) -> Vec<Point2> {
    vec![pt(x0, y0), pt(x1, y0), pt(x1, y1), pt(x0, y1)]
}

/// Scans at `centers` in order and returns the graph and the route through them.
fn scanned_route(map: &WorldMap, centers: &[Point2], r: f64) -> (ExplorationGraph, Vec<usize>) {
    let t = tol();
    let mut g = ExplorationGraph::new(t.eps_geom);
    let mut nodes = Vec::new();
    for &c in centers {
        g.absorb_scan(&compute_sights(map, c, r, &t).unwrap());
        nodes.push(g.find_node(c).unwrap());
    }
    (g, nodes)
}

#[test]
fn corner_bundle_holds_wall_segments_inside_the_turn() {
    let t = tol();
    let map = WorldMap::new(vec![rect(0., 0., 6., 6.)], None);
    let (a0, a1, a2) = (pt(-3., 3.), pt(-1., -1.), pt(3., -3.));
    let (g, nodes) = scanned_route(&map, &[a0, a1, a2], 3.0);
    let seq = build_bundle_sequence(&g, &nodes, &t).unwrap();
    let b = &seq.bundles[1];
    // Directions to the neighbours, measured from the vertex; the turn wraps the corner at 45 degrees.
    let lo = (a2 - a1).angle();
    let hi = (a0 - a1).angle();
    assert!((b.sector_angle - (hi - lo)).abs() < 1e-9);
    assert!(b.sector_angle < PI);
    for s in &b.segments {
        let a = (s.b - a1).angle();
        assert!(a > lo && a < hi, "segment end {:?} outside the turn", s.b);
    }
    assert!(b.segments.iter().any(|s| s.b.approx_eq(pt(0., 0.), 1e-9)), "corner ray missing");
    let on_walls = b
        .segments
        .iter()
        .filter(|s| s.b.x.abs() < 1e-9 && s.b.y >= -1e-9 || s.b.y.abs() < 1e-9 && s.b.x >= -1e-9)
        .count();
    assert!(on_walls >= 3, "only {on_walls} segments end on the walls");
}

#[test]
fn straight_vertex_keeps_its_bundle() {
    let t = tol();
    let (g, nodes) = scanned_route(&WorldMap::default(), &[pt(0., 0.), pt(3., 0.), pt(6., 0.)], 2.0);
    let seq = build_bundle_sequence(&g, &nodes, &t).unwrap();
    let b = &seq.bundles[1];
    assert!((b.sector_angle - PI).abs() < 1e-12);
    assert!(!b.is_degenerate());
    // Left of travel: everything points up.
    assert!(b.segments.iter().all(|s| s.b.y > 0.0));
}

#[test]
fn empty_turn_gets_a_fake_segment() {
    let t = tol();
    // Rays sit every 60 degrees and open points halfway between; a 20 degree turn from 35 to 55
    // degrees holds neither, so the vertex gets one fake segment along the bisector.
    let a1 = pt(0., 0.);
    let (a0, a2) = (a1 + Point2::from_polar(3.0, 35f64.to_radians()), a1 + Point2::from_polar(3.0, 55f64.to_radians()));
    let (g, nodes) = scanned_route(&WorldMap::default(), &[a0, a1, a2], 2.0);
    let seq = build_bundle_sequence(&g, &nodes, &t).unwrap();
    let b = &seq.bundles[1];
    assert_eq!(b.segments.len(), 1);
    assert!(b.segments[0].b.approx_eq(Point2::from_polar(2.0, 45f64.to_radians()), 1e-9));
    assert!((b.sector_angle - 20f64.to_radians()).abs() < 1e-9);
}

#[test]
fn open_point_inside_earlier_sight_is_rejected() {
    let t = tol();
    let map = WorldMap::default();
    let mut g = ExplorationGraph::new(t.eps_geom);
    assert_eq!(g.absorb_scan(&compute_sights(&map, pt(0., 0.), 2.0, &t).unwrap()), 6);
    let second = compute_sights(&map, pt(1., 0.), 2.0, &t).unwrap();
    // The open point at 150 degrees from (1,0) is 1.24 from the origin, inside the first scan's wedge.
    let back = second
        .open_points
        .iter()
        .map(|o| o.point)
        .find(|p| p.approx_eq(pt(1.0 - 3f64.sqrt(), 1.0), 1e-9))
        .unwrap();
    assert!(g.is_known(back));
    let admitted = g.absorb_scan(&second);
    assert!(admitted < 6);
    assert!(g.marked_open.iter().all(|m| !m.point.approx_eq(back, 1e-9)));
}

fn maps_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../maps")
}

#[test]
fn u_trap_route_is_shortened() {
    let sc = load_scenario(&maps_dir().join("u_trap.scenario.json")).unwrap();
    let map = load_map(&sc.map_path).unwrap();
    let params = PlanParams {
        solver: Solver::Mms,
        ..sc.params()
    };
    let trace = plan(&map, pt(sc.start[0], sc.start[1]), pt(sc.goal[0], sc.goal[1]), &params).unwrap();
    assert!(trace.path.last().unwrap().approx_eq(pt(sc.goal[0], sc.goal[1]), 1e-9));
    assert!(trace.returns.iter().any(|r| r.solver_length < r.tau_length));
}

fn rects() -> impl Strategy<Value = Vec<Vec<Point2>>> {
    prop::collection::vec((0.0..50.0f64, 0.0..50.0f64, 1.0..12.0f64, 1.0..12.0f64), 0..5)
        .prop_map(|v| v.into_iter().map(|(x, y, w, h)| rect(x, y, x + w, y + h)).collect())
}

/// Rectangles may overlap each other; that only matters for polygon simplicity, which each keeps.
fn world(obstacles: Vec<Vec<Point2>>) -> WorldMap {
    WorldMap::new(obstacles, Some([-5.0, -5.0, 70.0, 70.0]))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn sights_partition_the_circle(obs in rects(), cx in 0.0..60.0f64, cy in 0.0..60.0f64, r in 1.0..12.0f64) {
        let t = tol();
        let map = world(obs);
        let c = pt(cx, cy);
        prop_assume!(!map.is_blocked(c, 0.0) && map.clearance(c) > 1e-3);
        let scan = compute_sights(&map, c, r, &t).unwrap();
        prop_assert_eq!(scan.open_points.len(), scan.open_sights.len());
        for (s, o) in scan.open_sights.iter().zip(&scan.open_points) {
            prop_assert!(s.width <= FRAC_PI_3 + t.tol_angle);
            let expect = c + Point2::from_polar(r, s.start + 0.5 * s.width);
            prop_assert!(o.point.approx_eq(expect, 1e-9), "{:?} vs {:?}", o.point, expect);
        }
        let mut all: Vec<(f64, f64)> = scan
            .open_sights
            .iter()
            .chain(&scan.closed_sights)
            .map(|s| (s.start.rem_euclid(TAU), s.width))
            .collect();
        all.sort_by(|a, b| a.0.total_cmp(&b.0));
        let total: f64 = all.iter().map(|s| s.1).sum();
        prop_assert!((total - TAU).abs() < 1e-9, "widths sum to {}", total);
        for k in 0..all.len() {
            let end = all[k].0 + all[k].1;
            let next = all[(k + 1) % all.len()].0 + if k + 1 == all.len() { TAU } else { 0.0 };
            prop_assert!((end - next).abs() < 1e-9, "gap between {:?} and next start {}", all[k], next);
        }
    }

    #[test]
    fn open_points_admitted_only_when_unknown(
        obs in rects(),
        centers in prop::collection::vec((0.0..60.0f64, 0.0..60.0f64), 1..8),
        r in 3.0..10.0f64,
    ) {
        let t = tol();
        let map = world(obs);
        let mut g = ExplorationGraph::new(t.eps_geom);
        for (x, y) in centers {
            let c = pt(x, y);
            if map.is_blocked(c, 0.0) || map.clearance(c) <= 1e-3 {
                continue;
            }
            let scan = compute_sights(&map, c, r, &t).unwrap();
            let known = g.sights.clone();
            let fresh_from = g.marked_open.iter().map(|m| m.order + 1).max().unwrap_or(0);
            g.absorb_scan(&scan);
            for m in g.marked_open.iter().filter(|m| m.order >= fresh_from) {
                prop_assert!(!known.iter().any(|s| s.contains(m.point, t.eps_geom)));
            }
            for (i, a) in g.marked_open.iter().enumerate() {
                for b in &g.marked_open[i + 1..] {
                    prop_assert!(a.point.dist(b.point) > t.eps_geom);
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn planning_is_deterministic(obs in rects(), gx in 40.0..60.0f64, gy in 40.0..60.0f64) {
        let map = world(obs);
        let (start, goal) = (pt(0.0, 0.0), pt(gx, gy));
        prop_assume!(map.clearance(start) > 1e-3 && map.clearance(goal) > 1e-3);
        prop_assume!(!map.is_blocked(start, 0.0) && !map.is_blocked(goal, 0.0));
        let params = PlanParams { radius: 8.0, max_steps: 1_000, ..PlanParams::default() };
        let a = plan(&map, start, goal, &params);
        let b = plan(&map, start, goal, &params);
        match (a, b) {
            (Ok(a), Ok(b)) => {
                prop_assert_eq!(a.path.vertices(), b.path.vertices());
                prop_assert_eq!(a.scans, b.scans);
                let la: Vec<(u64, u64)> = a.returns.iter().map(|r| (r.tau_length.to_bits(), r.solver_length.to_bits())).collect();
                let lb: Vec<(u64, u64)> = b.returns.iter().map(|r| (r.tau_length.to_bits(), r.solver_length.to_bits())).collect();
                prop_assert_eq!(la, lb);
                for e in a.path.edges() {
                    prop_assert!(map.segment_is_free(e, 1e-9), "edge {:?} blocked", e);
                }
            }
            (Err(x), Err(y)) => prop_assert_eq!(x, y),
            (x, y) => prop_assert!(false, "runs disagree: {:?} vs {:?}", x.is_ok(), y.is_ok()),
        }
    }
}

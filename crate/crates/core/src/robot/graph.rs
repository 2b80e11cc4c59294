use std::cmp::Ordering;
use std::collections::{BTreeMap, BinaryHeap};

use super::sights::{SightRegion, SightScan};
use super::RobotError;
use crate::geometry::{Point2, PolylinePath};

/// An entry of the open-point set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OpenMark {
    pub point: Point2,
    pub rank: f64,
    pub node: usize,
    /// Insertion counter; breaks rank ties in favour of older marks.
    pub order: usize,
}

/// Visited centers, sight leaves and open points, joined by straight free edges.
#[derive(Debug, Clone, Default)]
pub struct ExplorationGraph {
    pub nodes: Vec<Point2>,
    pub adjacency: Vec<Vec<(usize, f64)>>,
    pub marked_open: Vec<OpenMark>,
    pub sights: Vec<SightRegion>,
    /// Scan taken at each visited center, keyed by node.
    pub scans: BTreeMap<usize, SightScan>,
    /// Nodes that can be shared: centers, open points and the goal. Leaves are always fresh.
    shared: Vec<usize>,
    next_order: usize,
    eps: f64,
}

#[derive(PartialEq)]
struct HeapItem(f64, usize);

impl Eq for HeapItem {}

impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then(other.1.cmp(&self.1))
    }
}

impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl ExplorationGraph {
    pub fn new(eps: f64) -> Self {
        ExplorationGraph {
            eps,
            ..Default::default()
        }
    }

    fn push_node(&mut self, p: Point2) -> usize {
        self.nodes.push(p);
        self.adjacency.push(Vec::new());
        self.nodes.len() - 1
    }

    /// Node at `p`, reusing a shared node within `eps`.
    pub fn shared_node(&mut self, p: Point2) -> usize {
        if let Some(&i) = self.shared.iter().find(|&&i| self.nodes[i].approx_eq(p, self.eps)) {
            return i;
        }
        let i = self.push_node(p);
        self.shared.push(i);
        i
    }

    pub fn find_node(&self, p: Point2) -> Option<usize> {
        self.shared.iter().copied().find(|&i| self.nodes[i].approx_eq(p, self.eps))
    }

    pub fn add_edge(&mut self, a: usize, b: usize) {
        if a == b || self.adjacency[a].iter().any(|&(n, _)| n == b) {
            return;
        }
        let w = self.nodes[a].dist(self.nodes[b]);
        self.adjacency[a].push((b, w));
        self.adjacency[b].push((a, w));
    }

    fn add_leaf(&mut self, center: usize, p: Point2) {
        if p.approx_eq(self.nodes[center], self.eps) {
            return;
        }
        let leaf = self.push_node(p);
        self.add_edge(center, leaf);
    }

    pub fn is_known(&self, p: Point2) -> bool {
        self.sights.iter().any(|s| s.contains(p, self.eps))
    }

    /// Records a scan: closed sights first, then every open point not already inside a
    /// recorded sight, together with its open sight. The center leaves the open set.
    /// Returns the number of admitted open points.
    pub fn absorb_scan(&mut self, scan: &SightScan) -> usize {
        let c = self.shared_node(scan.center);
        let eps = self.eps;
        self.marked_open.retain(|m| !m.point.approx_eq(scan.center, eps));
        if self.scans.contains_key(&c) {
            return 0;
        }
        for k in 0..scan.closed_sights.len() {
            let region = scan.closed_region(k);
            if let SightRegion::Fan { ends, .. } = &region {
                for &e in ends {
                    self.add_leaf(c, e);
                }
            }
            self.sights.push(region);
        }
        let mut admitted = 0;
        for (k, op) in scan.open_points.iter().enumerate() {
            if self.is_known(op.point) {
                continue;
            }
            let node = self.shared_node(op.point);
            self.add_edge(c, node);
            let sector = scan.open_sights[k];
            // An open sight holds no wall corners, so these are its two boundary rays.
            for ray in scan.rays_in(&sector, 1e-12) {
                self.add_leaf(c, ray.end);
            }
            self.sights.push(scan.open_region(k));
            self.marked_open.push(OpenMark {
                point: op.point,
                rank: op.rank,
                node,
                order: self.next_order,
            });
            self.next_order += 1;
            admitted += 1;
        }
        self.scans.insert(c, scan.clone());
        admitted
    }

    /// Highest-ranked open mark; ties go to the earliest insertion.
    pub fn best_open(&self) -> Option<usize> {
        (0..self.marked_open.len()).max_by(|&a, &b| {
            let (x, y) = (&self.marked_open[a], &self.marked_open[b]);
            x.rank.total_cmp(&y.rank).then(y.order.cmp(&x.order))
        })
    }

    pub fn take_open(&mut self, i: usize) -> OpenMark {
        self.marked_open.remove(i)
    }

    /// Dijkstra from `a` to `b`; returns the node sequence.
    pub fn shortest_nodes(&self, a: usize, b: usize) -> Result<Vec<usize>, RobotError> {
        let n = self.nodes.len();
        if a >= n || b >= n {
            return Err(RobotError::Unreachable);
        }
        let mut dist = vec![f64::INFINITY; n];
        let mut prev = vec![usize::MAX; n];
        let mut heap = BinaryHeap::new();
        dist[a] = 0.0;
        heap.push(HeapItem(0.0, a));
        while let Some(HeapItem(d, u)) = heap.pop() {
            if d > dist[u] {
                continue;
            }
            if u == b {
                break;
            }
            for &(v, w) in &self.adjacency[u] {
                let nd = d + w;
                if nd < dist[v] {
                    dist[v] = nd;
                    prev[v] = u;
                    heap.push(HeapItem(nd, v));
                }
            }
        }
        if !dist[b].is_finite() {
            return Err(RobotError::Unreachable);
        }
        let mut path = vec![b];
        while *path.last().unwrap() != a {
            path.push(prev[*path.last().unwrap()]);
        }
        path.reverse();
        Ok(path)
    }
}

/// Shortest route between two nodes of `g`, as a polyline.
pub fn graph_shortest_path(g: &ExplorationGraph, a: usize, b: usize) -> Result<PolylinePath, RobotError> {
    let nodes = g.shortest_nodes(a, b)?;
    Ok(PolylinePath::with_eps(nodes.iter().map(|&i| g.nodes[i]), 0.0))
}

//! Shortest-path engine over eps-graphs: exact relaxed distances,
//! near-geodesic enumeration, the recursive chord upper bound, and
//! eps-sweep bracketing.

use crate::eps_graph::{
    build_graph, containment_certificate, EdgeKind, ExactnessCertificate, Graph,
};
use crate::error::{Error, Result};
use crate::geometry::{project, Point};
use crate::sampler::{fmt17, Scene};
use serde::Serialize;
use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashSet};

/// Default ball-shrink factor for the recursive upper-bound construction.
pub const DEFAULT_KENDALL_ALPHA: f64 = 0.3;
/// Default recursion depth cap; leftover gaps are patched at speed eps.
pub const DEFAULT_KENDALL_DEPTH: u32 = 16;

// ---------------------------------------------------------------------------
// Paths
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum SegmentMode {
    Road { id: u64, v: f64 },
    Straight { eps: f64 },
}

impl SegmentMode {
    pub fn speed(self) -> f64 {
        match self {
            SegmentMode::Road { v, .. } => v,
            SegmentMode::Straight { eps } => eps,
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct PathSegment {
    pub from: Point,
    pub to: Point,
    pub mode: SegmentMode,
    pub time: f64,
}

/// Alternating road/straight polyline with per-segment driving times.
#[derive(Clone, Debug, Serialize)]
pub struct GeodesicPath {
    pub segments: Vec<PathSegment>,
    pub total_time: f64,
}

impl GeodesicPath {
    fn from_segments(segments: Vec<PathSegment>) -> Self {
        let total_time = segments.iter().map(|s| s.time).sum();
        GeodesicPath {
            segments,
            total_time,
        }
    }

    /// Polyline vertices in travel order (empty for a trivial path).
    pub fn vertices(&self) -> Vec<Point> {
        let mut out = Vec::with_capacity(self.segments.len() + 1);
        if let Some(first) = self.segments.first() {
            out.push(first.from);
        }
        for s in &self.segments {
            out.push(s.to);
        }
        out
    }

    /// Speed-limit audit: each segment's time equals length over the speed of
    /// its mode, endpoints chain, and road segments lie on their road's line.
    pub fn audit(&self, scene: &Scene) -> bool {
        for pair in self.segments.windows(2) {
            if pair[0].to.dist(pair[1].from) > 1e-9 {
                return false;
            }
        }
        let mut sum = 0.0;
        for s in &self.segments {
            let expect = s.from.dist(s.to) / s.mode.speed();
            if (s.time - expect).abs() > 1e-12 * expect.max(1.0) {
                return false;
            }
            sum += s.time;
            if let SegmentMode::Road { id, v } = s.mode {
                match scene.roads().iter().find(|r| r.id == id) {
                    Some(road) => {
                        if road.v != v
                            || road.line.dist_to_point(s.from) > 1e-9
                            || road.line.dist_to_point(s.to) > 1e-9
                        {
                            return false;
                        }
                    }
                    None => return false,
                }
            }
        }
        (self.total_time - sum).abs() <= 1e-12 * sum.max(1.0)
    }

    /// One line per segment: `mode road_id_or_- x1 y1 x2 y2 time`.
    pub fn record(&self, certificate: &ExactnessCertificate, eps: f64) -> String {
        use std::fmt::Write as _;
        let mut s = String::new();
        let _ = writeln!(
            s,
            "roadmetric-path v1 total_time={} eps={} margin={} containment_ok={} containment_radius={}",
            fmt17(self.total_time),
            fmt17(eps),
            certificate.double_refraction_margin,
            certificate.containment_ok,
            certificate.containment_radius
        );
        for seg in &self.segments {
            let (mode, id) = match seg.mode {
                SegmentMode::Road { id, .. } => ("road", id.to_string()),
                SegmentMode::Straight { .. } => ("straight", "-".to_string()),
            };
            let _ = writeln!(
                s,
                "{mode} {id} {} {} {} {} {}",
                fmt17(seg.from.x),
                fmt17(seg.from.y),
                fmt17(seg.to.x),
                fmt17(seg.to.y),
                fmt17(seg.time)
            );
        }
        s
    }
}

/// Symmetric Hausdorff distance between two polylines, evaluated at their
/// vertices against the other polyline's segments. Exact enough for the
/// near-duplicate threshold used here.
pub fn polyline_hausdorff(a: &[Point], b: &[Point]) -> f64 {
    fn one_way(from: &[Point], to: &[Point]) -> f64 {
        let mut worst: f64 = 0.0;
        for &p in from {
            let mut best = f64::INFINITY;
            if to.len() == 1 {
                best = p.dist(to[0]);
            }
            for seg in to.windows(2) {
                best = best.min(crate::geometry::Segment::new(seg[0], seg[1]).dist_to_point(p));
            }
            worst = worst.max(best);
        }
        worst
    }
    if a.is_empty() || b.is_empty() {
        return if a.is_empty() && b.is_empty() {
            0.0
        } else {
            f64::INFINITY
        };
    }
    one_way(a, b).max(one_way(b, a))
}

// ---------------------------------------------------------------------------
// Dijkstra
// ---------------------------------------------------------------------------

#[derive(PartialEq)]
struct HeapEntry {
    dist: f64,
    node: u32,
}

impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap via reversal; ties broken by node id for reproducibility
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

const NO_PRED: u32 = u32::MAX;

/// Dijkstra from the graph source. `stop_at` enables early exit for
/// single-target queries; banned nodes/edges support spur computations.
fn dijkstra(
    g: &Graph,
    stop_at: Option<u32>,
    banned_nodes: Option<&[bool]>,
    banned_edges: Option<&HashSet<(u32, u32)>>,
    start: u32,
) -> (Vec<f64>, Vec<u32>) {
    let n = g.nodes.len();
    let mut dist = vec![f64::INFINITY; n];
    let mut pred_edge = vec![NO_PRED; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    if banned_nodes.is_none_or(|b| !b[start as usize]) {
        dist[start as usize] = 0.0;
        heap.push(HeapEntry {
            dist: 0.0,
            node: start,
        });
    }
    while let Some(HeapEntry { dist: d, node }) = heap.pop() {
        if done[node as usize] {
            continue;
        }
        done[node as usize] = true;
        if stop_at == Some(node) {
            break;
        }
        for &ei in g.out_edge_indices(node) {
            let e = &g.edges[ei as usize];
            if done[e.to as usize] {
                continue;
            }
            if let Some(b) = banned_nodes {
                if b[e.to as usize] {
                    continue;
                }
            }
            if let Some(b) = banned_edges {
                if b.contains(&(e.from, e.to)) {
                    continue;
                }
            }
            let nd = d + e.weight;
            if nd < dist[e.to as usize] {
                dist[e.to as usize] = nd;
                pred_edge[e.to as usize] = ei;
                heap.push(HeapEntry {
                    dist: nd,
                    node: e.to,
                });
            }
        }
    }
    (dist, pred_edge)
}

/// Distances from the source to every node (multi-target queries).
pub fn distances_from_source(g: &Graph) -> Vec<f64> {
    dijkstra(g, None, None, None, g.source).0
}

/// Shortest-path value from source to the (single) target.
pub fn distance_to_target(g: &Graph) -> f64 {
    let (dist, _) = dijkstra(g, Some(g.target()), None, None, g.source);
    dist[g.target() as usize]
}

fn node_sequence(g: &Graph, pred_edge: &[u32], target: u32) -> Vec<u32> {
    let mut nodes = vec![target];
    let mut cur = target;
    while pred_edge[cur as usize] != NO_PRED {
        let e = &g.edges[pred_edge[cur as usize] as usize];
        cur = e.from;
        nodes.push(cur);
    }
    nodes.reverse();
    nodes
}

fn edges_of_sequence(g: &Graph, pred_edge: &[u32], target: u32) -> Vec<u32> {
    let mut edges = Vec::new();
    let mut cur = target;
    while pred_edge[cur as usize] != NO_PRED {
        let idx = pred_edge[cur as usize];
        edges.push(idx);
        cur = g.edges[idx as usize].from;
    }
    edges.reverse();
    edges
}

/// Collapse a sequence of graph edges into merged path segments: consecutive
/// edges on the same road merge, zero-length edges disappear.
fn assemble(g: &Graph, edge_seq: &[u32]) -> GeodesicPath {
    let mut segments: Vec<PathSegment> = Vec::new();
    for &ei in edge_seq {
        let e = &g.edges[ei as usize];
        if e.length == 0.0 {
            continue;
        }
        let from = g.nodes[e.from as usize].position;
        let to = g.nodes[e.to as usize].position;
        let mode = match e.kind {
            EdgeKind::OnRoad(id) => SegmentMode::Road {
                id,
                v: g.road_speed(id),
            },
            EdgeKind::OffRoad => SegmentMode::Straight { eps: g.eps },
        };
        let mergeable = segments.last().is_some_and(|last| match (last.mode, mode) {
            (SegmentMode::Road { id: a, .. }, SegmentMode::Road { id: b, .. }) => a == b,
            _ => false,
        });
        if mergeable {
            let last = segments.last_mut().unwrap();
            last.to = to;
            let length = last.from.dist(last.to);
            last.time = length / last.mode.speed();
        } else {
            segments.push(PathSegment {
                from,
                to,
                mode,
                time: e.length / mode.speed(),
            });
        }
    }
    GeodesicPath::from_segments(segments)
}

/// Dijkstra-optimal source-to-target path with merged segments.
pub fn shortest_path(g: &Graph) -> GeodesicPath {
    let (_, pred) = dijkstra(g, Some(g.target()), None, None, g.source);
    assemble(g, &edges_of_sequence(g, &pred, g.target()))
}

// ---------------------------------------------------------------------------
// Query-level API
// ---------------------------------------------------------------------------

/// Relaxed distance with the exactness evidence and the constructive upper
/// bound for the same query.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct BracketResult {
    pub eps: f64,
    pub t_eps: f64,
    pub kendall_ub: f64,
    pub certificate: ExactnessCertificate,
}

/// Relaxed distance from `x` to `y`: builds the exact-mode graph, solves,
/// and attaches certificates plus the recursive upper bound.
pub fn t_eps(scene: &Scene, x: Point, y: Point, eps: f64) -> BracketResult {
    t_eps_with_path(scene, x, y, eps).0
}

/// Geodesic without certificates; the workhorse for batch scanners.
pub fn geodesic_between(scene: &Scene, x: Point, y: Point, eps: f64) -> GeodesicPath {
    shortest_path(&build_graph(scene, x, y, eps))
}

/// Relaxed distance value without certificates.
pub fn distance_between(scene: &Scene, x: Point, y: Point, eps: f64) -> f64 {
    distance_to_target(&build_graph(scene, x, y, eps))
}

pub fn t_eps_with_path(
    scene: &Scene,
    x: Point,
    y: Point,
    eps: f64,
) -> (BracketResult, GeodesicPath) {
    let g = build_graph(scene, x, y, eps);
    let path = shortest_path(&g);
    let value = path.total_time;
    let certificate = containment_certificate(scene, x, y, value, eps);
    let (kendall_ub, _) = kendall_upper_bound(
        scene,
        x,
        y,
        eps,
        DEFAULT_KENDALL_ALPHA,
        DEFAULT_KENDALL_DEPTH,
    );
    (
        BracketResult {
            eps,
            t_eps: value,
            kendall_ub,
            certificate,
        },
        path,
    )
}

/// Up to `k` loopless paths within `slack` of the optimum, sorted by time,
/// with geometric near-duplicates (Hausdorff distance below 1e-6) collapsed.
pub fn k_near_geodesics(
    scene: &Scene,
    x: Point,
    y: Point,
    eps: f64,
    k: usize,
    slack: f64,
) -> Vec<GeodesicPath> {
    assert!(k >= 1 && slack >= 0.0);
    let g = build_graph(scene, x, y, eps);
    let raw = yen_paths(&g, k + 8, slack);
    let mut out: Vec<GeodesicPath> = Vec::new();
    for (edges, _) in &raw {
        let path = assemble(&g, edges);
        let verts = path.vertices();
        let duplicate = out
            .iter()
            .any(|p| polyline_hausdorff(&p.vertices(), &verts) < 1e-6);
        if !duplicate {
            out.push(path);
        }
        if out.len() == k {
            break;
        }
    }
    out
}

/// Yen's loopless enumeration; returns edge sequences with times, in
/// nondecreasing time order, stopping past `best + slack`.
fn yen_paths(g: &Graph, max_paths: usize, slack: f64) -> Vec<(Vec<u32>, f64)> {
    let target = g.target();
    let (dist, pred) = dijkstra(g, Some(target), None, None, g.source);
    if dist[target as usize].is_infinite() {
        return Vec::new();
    }
    let best = dist[target as usize];
    let first_nodes = node_sequence(g, &pred, target);
    let first_edges = edges_of_sequence(g, &pred, target);
    let mut accepted: Vec<(Vec<u32>, Vec<u32>, f64)> = vec![(first_nodes, first_edges, best)];

    #[derive(PartialEq)]
    struct Candidate {
        time: f64,
        nodes: Vec<u32>,
        edges: Vec<u32>,
    }
    impl Eq for Candidate {}
    impl Ord for Candidate {
        fn cmp(&self, other: &Self) -> Ordering {
            other
                .time
                .total_cmp(&self.time)
                .then_with(|| other.nodes.cmp(&self.nodes))
        }
    }
    impl PartialOrd for Candidate {
        fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
            Some(self.cmp(other))
        }
    }

    let mut candidates: BinaryHeap<Candidate> = BinaryHeap::new();
    let mut seen: HashSet<Vec<u32>> = HashSet::new();
    seen.insert(accepted[0].0.clone());

    while accepted.len() < max_paths {
        let (prev_nodes, prev_edges, _) = accepted.last().unwrap().clone();
        for spur_idx in 0..prev_nodes.len() - 1 {
            let spur = prev_nodes[spur_idx];
            let mut banned_nodes = vec![false; g.nodes.len()];
            for &n in &prev_nodes[..spur_idx] {
                banned_nodes[n as usize] = true;
            }
            let mut banned_edges: HashSet<(u32, u32)> = HashSet::new();
            for (nodes, _, _) in &accepted {
                if nodes.len() > spur_idx + 1 && nodes[..=spur_idx] == prev_nodes[..=spur_idx] {
                    banned_edges.insert((nodes[spur_idx], nodes[spur_idx + 1]));
                }
            }
            let (sd, sp) = dijkstra(
                g,
                Some(target),
                Some(&banned_nodes),
                Some(&banned_edges),
                spur,
            );
            if sd[target as usize].is_infinite() {
                continue;
            }
            let spur_nodes = node_sequence(g, &sp, target);
            let spur_edges = edges_of_sequence(g, &sp, target);
            let mut nodes = prev_nodes[..spur_idx].to_vec();
            nodes.extend_from_slice(&spur_nodes);
            if !seen.insert(nodes.clone()) {
                continue;
            }
            let mut edges = prev_edges[..spur_idx].to_vec();
            edges.extend_from_slice(&spur_edges);
            let time: f64 = edges.iter().map(|&e| g.edges[e as usize].weight).sum();
            candidates.push(Candidate { time, nodes, edges });
        }
        match candidates.pop() {
            Some(c) if c.time <= best + slack => accepted.push((c.nodes, c.edges, c.time)),
            _ => break,
        }
    }
    accepted
        .into_iter()
        .filter(|(_, _, t)| *t <= best + slack)
        .map(|(_, e, t)| (e, t))
        .collect()
}

/// Recursive chord construction: for a pair of points, drive the projection
/// chord of the fastest road hitting both shrunken balls, recurse on the
/// gaps, and patch whatever remains at speed eps. Returns the assembled
/// driving time and path; always at least the exact relaxed distance.
pub fn kendall_upper_bound(
    scene: &Scene,
    x: Point,
    y: Point,
    eps: f64,
    alpha: f64,
    depth_max: u32,
) -> (f64, GeodesicPath) {
    assert!(alpha > 0.0 && alpha < 1.0, "alpha must lie in (0, 1)");
    let mut segments = Vec::new();
    let params = KendallParams {
        eps,
        alpha,
        depth_max,
    };
    kendall_recurse(scene, &params, x, y, 0, &mut segments);
    let path = GeodesicPath::from_segments(segments);
    (path.total_time, path)
}

struct KendallParams {
    eps: f64,
    alpha: f64,
    depth_max: u32,
}

fn kendall_recurse(
    scene: &Scene,
    params: &KendallParams,
    x: Point,
    y: Point,
    depth: u32,
    out: &mut Vec<PathSegment>,
) {
    let gap = x.dist(y);
    if gap == 0.0 {
        return;
    }
    if depth >= params.depth_max {
        out.push(straight(x, y, params.eps));
        return;
    }
    let r = params.alpha * gap;
    // roads are sorted by speed descending: first hit is the fastest
    let road = scene
        .roads()
        .iter()
        .find(|road| road.line.dist_to_point(x) <= r && road.line.dist_to_point(y) <= r);
    match road {
        None => out.push(straight(x, y, params.eps)),
        Some(road) => {
            let xp = project(x, road.line);
            let yp = project(y, road.line);
            kendall_recurse(scene, params, x, xp, depth + 1, out);
            if xp.dist(yp) > 0.0 {
                out.push(PathSegment {
                    from: xp,
                    to: yp,
                    mode: SegmentMode::Road {
                        id: road.id,
                        v: road.v,
                    },
                    time: xp.dist(yp) / road.v,
                });
            }
            kendall_recurse(scene, params, yp, y, depth + 1, out);
        }
    }
}

fn straight(x: Point, y: Point, eps: f64) -> PathSegment {
    PathSegment {
        from: x,
        to: y,
        mode: SegmentMode::Straight { eps },
        time: x.dist(y) / eps,
    }
}

/// Bracket sequence over a strictly decreasing eps list; values are
/// nondecreasing as eps decreases.
pub fn eps_sweep(
    scene: &Scene,
    x: Point,
    y: Point,
    eps_list: &[f64],
) -> Result<Vec<BracketResult>> {
    for pair in eps_list.windows(2) {
        if pair[1] >= pair[0] {
            return Err(Error::invalid(
                "eps_list",
                format!(
                    "must be strictly decreasing, got {} before {}",
                    pair[0], pair[1]
                ),
            ));
        }
    }
    for &eps in eps_list {
        if eps < scene.v_min {
            return Err(Error::EpsBelowCutoff {
                eps,
                v_min: scene.v_min,
            });
        }
    }
    Ok(eps_list
        .iter()
        .map(|&eps| t_eps(scene, x, y, eps))
        .collect())
}

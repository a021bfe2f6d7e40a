//! Finite weighted-graph reduction of relaxed geodesic computation.
//!
//! A geodesic path at relaxation `eps` consists of a straight leg at speed
//! `eps`, a chain of road segments on roads faster than `eps`, and a final
//! straight leg. Road changes happen at intersections and the straight legs
//! attach at refraction points of the terminals, so shortest paths live on a
//! finite graph: terminals, road-road intersections, and per-terminal
//! refraction nodes, with on-road edges along each road and off-road edges
//! from the source and into the target.
//!
//! Exact mode omits interior off-road hops. This loses nothing unless two
//! roads admit a common double-refraction direction, a degenerate
//! configuration whose distance from the sample is quantified by
//! [`double_refraction_margin`]; full mode adds densely sampled hop
//! candidates as a validation fallback.

use crate::geometry::{refraction_points, Ellipse, Line, Point, GEOM_TOL};
use crate::sampler::Scene;
use serde::Serialize;
use std::fmt::Write as _;

/// Which terminal a refraction node belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Terminal {
    Source,
    /// Index into the target list; 0 for single-target builds.
    Target(u32),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum NodeKind {
    Terminal(Terminal),
    Intersection {
        i: u64,
        j: u64,
    },
    Refraction {
        road: u64,
        terminal: Terminal,
    },
    /// Full-mode hop candidate (sampled departure or refraction landing).
    Hop {
        road: u64,
    },
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Node {
    pub id: u32,
    pub kind: NodeKind,
    pub position: Point,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum EdgeKind {
    OnRoad(u64),
    OffRoad,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Edge {
    pub from: u32,
    pub to: u32,
    pub kind: EdgeKind,
    pub length: f64,
    pub weight: f64,
}

/// Directed weighted graph for one relaxed-geodesic query.
#[derive(Clone, Debug)]
pub struct Graph {
    pub nodes: Vec<Node>,
    pub edges: Vec<Edge>,
    adj: Vec<Vec<u32>>,
    pub source: u32,
    pub targets: Vec<u32>,
    pub eps: f64,
    /// (road id, speed) of the roads participating in the graph.
    pub road_speeds: Vec<(u64, f64)>,
}

impl Graph {
    pub fn out_edges(&self, node: u32) -> impl Iterator<Item = &Edge> {
        self.adj[node as usize]
            .iter()
            .map(|&e| &self.edges[e as usize])
    }

    /// Indices into `edges` of the arcs leaving `node`.
    pub fn out_edge_indices(&self, node: u32) -> &[u32] {
        &self.adj[node as usize]
    }

    /// Single-target convenience accessor.
    pub fn target(&self) -> u32 {
        self.targets[0]
    }

    pub fn road_speed(&self, id: u64) -> f64 {
        self.road_speeds
            .iter()
            .find(|(r, _)| *r == id)
            .map(|(_, v)| *v)
            .expect("edge references a road absent from the graph")
    }

    /// Debug dump: `node id kind x y` and `edge from to kind length weight`.
    pub fn dump_text(&self) -> String {
        let mut s = String::new();
        for n in &self.nodes {
            let kind = match n.kind {
                NodeKind::Terminal(Terminal::Source) => "terminal:source".to_string(),
                NodeKind::Terminal(Terminal::Target(k)) => format!("terminal:target:{k}"),
                NodeKind::Intersection { i, j } => format!("intersection:{i}:{j}"),
                NodeKind::Refraction { road, terminal } => match terminal {
                    Terminal::Source => format!("refraction:{road}:source"),
                    Terminal::Target(k) => format!("refraction:{road}:target:{k}"),
                },
                NodeKind::Hop { road } => format!("hop:{road}"),
            };
            let _ = writeln!(
                s,
                "node {} {} {} {}",
                n.id, kind, n.position.x, n.position.y
            );
        }
        for e in &self.edges {
            let kind = match e.kind {
                EdgeKind::OnRoad(r) => format!("onroad:{r}"),
                EdgeKind::OffRoad => "offroad".to_string(),
            };
            let _ = writeln!(
                s,
                "edge {} {} {} {} {}",
                e.from, e.to, kind, e.length, e.weight
            );
        }
        s
    }
}

struct Builder<'a> {
    scene: &'a Scene,
    eps: f64,
    nodes: Vec<Node>,
    edges: Vec<Edge>,
    /// Indices into `scene.roads()` of roads faster than eps, sorted by id.
    fast: Vec<usize>,
    /// Per fast road: (abscissa, node id) entries collected before chaining.
    chains: Vec<Vec<(f64, u32)>>,
}

impl<'a> Builder<'a> {
    fn new(scene: &'a Scene, eps: f64) -> Self {
        if eps < scene.v_min {
            log::warn!(
                "eps {} below scene cutoff {}: roads relevant at this eps may be missing",
                eps,
                scene.v_min
            );
        }
        let mut fast: Vec<usize> = (0..scene.roads().len())
            .filter(|&i| scene.roads()[i].v > eps)
            .collect();
        fast.sort_by_key(|&i| scene.roads()[i].id);
        let chains = vec![Vec::new(); fast.len()];
        Builder {
            scene,
            eps,
            nodes: Vec::new(),
            edges: Vec::new(),
            fast,
            chains,
        }
    }

    fn add_node(&mut self, kind: NodeKind, position: Point) -> u32 {
        let id = self.nodes.len() as u32;
        self.nodes.push(Node { id, kind, position });
        id
    }

    fn register(&mut self, fast_idx: usize, node: u32, abscissa: f64) {
        self.chains[fast_idx].push((abscissa, node));
    }

    fn line(&self, fast_idx: usize) -> Line {
        self.scene.roads()[self.fast[fast_idx]].line
    }

    fn road_v(&self, fast_idx: usize) -> f64 {
        self.scene.roads()[self.fast[fast_idx]].v
    }

    fn road_id(&self, fast_idx: usize) -> u64 {
        self.scene.roads()[self.fast[fast_idx]].id
    }

    /// Terminal node plus chain registration when it lies on a road; returns
    /// the set of fast-road indices it was snapped onto.
    fn add_terminal(&mut self, terminal: Terminal, p: Point) -> (u32, Vec<usize>) {
        let id = self.add_node(NodeKind::Terminal(terminal), p);
        let mut snapped = Vec::new();
        for k in 0..self.fast.len() {
            let line = self.line(k);
            if line.dist_to_point(p) < GEOM_TOL {
                self.register(k, id, line.abscissa(p));
                snapped.push(k);
            }
        }
        (id, snapped)
    }

    fn add_intersections(&mut self) {
        for a in 0..self.fast.len() {
            for b in (a + 1)..self.fast.len() {
                let (la, lb) = (self.line(a), self.line(b));
                if let Some(p) = crate::geometry::intersect(la, lb) {
                    let kind = NodeKind::Intersection {
                        i: self.road_id(a),
                        j: self.road_id(b),
                    };
                    let id = self.add_node(kind, p);
                    self.register(a, id, la.abscissa(p));
                    self.register(b, id, lb.abscissa(p));
                }
            }
        }
    }

    fn add_refraction_nodes(&mut self, terminal: Terminal, p: Point, snapped: &[usize]) {
        for k in 0..self.fast.len() {
            if snapped.contains(&k) {
                continue;
            }
            let line = self.line(k);
            if let Some(points) = refraction_points(p, line, self.road_v(k), self.eps) {
                let road = self.road_id(k);
                for y in points {
                    let id = self.add_node(NodeKind::Refraction { road, terminal }, y);
                    self.register(k, id, line.abscissa(y));
                }
            }
        }
    }

    /// On-road edges between consecutive chain entries, both directions.
    fn chain_edges(&mut self) {
        for k in 0..self.fast.len() {
            let mut chain = std::mem::take(&mut self.chains[k]);
            chain.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            let v = self.road_v(k);
            let road = self.road_id(k);
            for pair in chain.windows(2) {
                let (from, to) = (pair[0].1, pair[1].1);
                let length = self.nodes[from as usize]
                    .position
                    .dist(self.nodes[to as usize].position);
                self.push_bidirectional(from, to, EdgeKind::OnRoad(road), length, length / v);
            }
            self.chains[k] = chain;
        }
    }

    fn push_edge(&mut self, from: u32, to: u32, kind: EdgeKind, length: f64, weight: f64) {
        self.edges.push(Edge {
            from,
            to,
            kind,
            length,
            weight,
        });
    }

    fn push_bidirectional(&mut self, a: u32, b: u32, kind: EdgeKind, length: f64, weight: f64) {
        self.push_edge(a, b, kind, length, weight);
        self.push_edge(b, a, kind, length, weight);
    }

    fn offroad(&mut self, from: u32, to: u32) {
        let length = self.nodes[from as usize]
            .position
            .dist(self.nodes[to as usize].position);
        self.push_edge(from, to, EdgeKind::OffRoad, length, length / self.eps);
    }

    fn finalize(self, source: u32, targets: Vec<u32>) -> Graph {
        let mut adj = vec![Vec::new(); self.nodes.len()];
        for (idx, e) in self.edges.iter().enumerate() {
            adj[e.from as usize].push(idx as u32);
        }
        let road_speeds = self
            .fast
            .iter()
            .map(|&i| {
                let r = &self.scene.roads()[i];
                (r.id, r.v)
            })
            .collect();
        Graph {
            nodes: self.nodes,
            edges: self.edges,
            adj,
            source,
            targets,
            eps: self.eps,
            road_speeds,
        }
    }
}

/// Exact-mode graph for a single source/target query.
pub fn build_graph(scene: &Scene, source: Point, target: Point, eps: f64) -> Graph {
    build_graph_multi(scene, source, &[target], eps)
}

/// Exact-mode graph with several targets sharing one source (multi-target
/// queries such as ball rasters). Each target receives incoming off-road
/// edges from its own refraction nodes and from the source; targets have no
/// outgoing edges.
pub fn build_graph_multi(scene: &Scene, source: Point, targets: &[Point], eps: f64) -> Graph {
    assert!(eps > 0.0, "eps must be positive");
    let mut b = Builder::new(scene, eps);
    let (source_id, source_snapped) = b.add_terminal(Terminal::Source, source);
    let mut target_ids = Vec::with_capacity(targets.len());
    let mut target_snaps = Vec::with_capacity(targets.len());
    for (k, &t) in targets.iter().enumerate() {
        let (id, snapped) = b.add_terminal(Terminal::Target(k as u32), t);
        target_ids.push(id);
        target_snaps.push(snapped);
    }
    b.add_intersections();
    b.add_refraction_nodes(Terminal::Source, source, &source_snapped);
    let mut target_refraction_ranges = Vec::with_capacity(targets.len());
    for (k, &t) in targets.iter().enumerate() {
        let lo = b.nodes.len() as u32;
        b.add_refraction_nodes(Terminal::Target(k as u32), t, &target_snaps[k]);
        target_refraction_ranges.push(lo..b.nodes.len() as u32);
    }
    b.chain_edges();

    // off-road: source reaches every other node directly
    for n in (0..b.nodes.len() as u32).filter(|&n| n != source_id) {
        b.offroad(source_id, n);
    }
    if target_ids.len() == 1 {
        // single target: every node may exit straight into the target
        let t = target_ids[0];
        for n in (0..b.nodes.len() as u32).filter(|&n| n != t && n != source_id) {
            b.offroad(n, t);
        }
    } else {
        for (k, &t) in target_ids.iter().enumerate() {
            for n in target_refraction_ranges[k].clone() {
                b.offroad(n, t);
            }
        }
    }
    b.finalize(source_id, target_ids)
}

/// Number of hop departure samples per (ordered road pair) in full mode.
pub const FULL_MODE_HOP_SAMPLES: usize = 64;

/// Validation-mode graph: the exact graph plus off-road edges between every
/// pair of exact-mode road nodes, plus road-to-road hop candidates sampled
/// on 64 abscissae per ordered road pair inside the containment ellipse of
/// the exact-mode optimum.
pub fn build_graph_full(scene: &Scene, source: Point, target: Point, eps: f64) -> Graph {
    let exact = build_graph(scene, source, target, eps);
    let upper_bound = crate::solver::distance_to_target(&exact);

    let mut b = Builder::new(scene, eps);
    let (source_id, source_snapped) = b.add_terminal(Terminal::Source, source);
    let (target_id, target_snapped) = b.add_terminal(Terminal::Target(0), target);
    b.add_intersections();
    b.add_refraction_nodes(Terminal::Source, source, &source_snapped);
    b.add_refraction_nodes(Terminal::Target(0), target, &target_snapped);
    let road_nodes: Vec<u32> = (0..b.nodes.len() as u32)
        .filter(|&n| n != source_id && n != target_id)
        .collect();

    // hop candidates inside the region that could contain improving paths
    let v_eff = scene.v_max().max(eps);
    let region = Ellipse::from_foci(source, target, upper_bound * v_eff);
    if let Some(region) = region {
        for a in 0..b.fast.len() {
            let la = b.line(a);
            let Some((t0, t1)) = region.line_chord(la) else {
                continue;
            };
            for bidx in 0..b.fast.len() {
                if bidx == a {
                    continue;
                }
                let lb = b.line(bidx);
                let (vb, rb, ra) = (b.road_v(bidx), b.road_id(bidx), b.road_id(a));
                for i in 0..FULL_MODE_HOP_SAMPLES {
                    let t = t0 + (t1 - t0) * ((i as f64 + 0.5) / FULL_MODE_HOP_SAMPLES as f64);
                    let p = la.point_at(t);
                    let Some(landings) = refraction_points(p, lb, vb, eps) else {
                        continue;
                    };
                    let dep = b.add_node(NodeKind::Hop { road: ra }, p);
                    b.register(a, dep, t);
                    for y in landings {
                        let land = b.add_node(NodeKind::Hop { road: rb }, y);
                        b.register(bidx, land, lb.abscissa(y));
                        let length = p.dist(y);
                        b.push_bidirectional(dep, land, EdgeKind::OffRoad, length, length / eps);
                    }
                }
            }
        }
    }
    b.chain_edges();

    for n in (0..b.nodes.len() as u32).filter(|&n| n != source_id) {
        b.offroad(source_id, n);
    }
    for n in (0..b.nodes.len() as u32).filter(|&n| n != target_id && n != source_id) {
        b.offroad(n, target_id);
    }
    // straight hops between every pair of exact-mode road nodes
    for (i, &m) in road_nodes.iter().enumerate() {
        for &n in &road_nodes[i + 1..] {
            let length = b.nodes[m as usize]
                .position
                .dist(b.nodes[n as usize].position);
            b.push_bidirectional(m, n, EdgeKind::OffRoad, length, length / eps);
        }
    }
    b.finalize(source_id, vec![target_id])
}

/// Distance of the sampled configuration from a double-refraction
/// degeneracy: for each pair of roads faster than eps, solve
/// `<e, dir_i> = +-eps/v_i`, `<e, dir_j> = +-eps/v_j` and measure how far the
/// solution is from the unit circle. Returns infinity when fewer than two
/// roads qualify; 0 means a degenerate configuration exists.
pub fn double_refraction_margin(scene: &Scene, eps: f64) -> f64 {
    let fast: Vec<_> = scene.roads().iter().filter(|r| r.v > eps).collect();
    let mut margin = f64::INFINITY;
    for (k, a) in fast.iter().enumerate() {
        for b in &fast[k + 1..] {
            let (da, db) = (a.line.dir(), b.line.dir());
            let det = da.x * db.y - da.y * db.x;
            if det.abs() < crate::geometry::PARALLEL_TOL {
                continue;
            }
            let (qa, qb) = (eps / a.v, eps / b.v);
            for sb in [1.0, -1.0] {
                // flipping both signs mirrors e, so two sign choices suffice
                let rhs = Point::new(qa, sb * qb);
                let e = Point::new(
                    (db.y * rhs.x - da.y * rhs.y) / det,
                    (-db.x * rhs.x + da.x * rhs.y) / det,
                );
                margin = margin.min((e.dot(e) - 1.0).abs());
            }
        }
    }
    margin
}

/// Evidence that a computed value is an exact sample of the untruncated
/// process: no unsampled road can touch any candidate geodesic, and no
/// double-refraction degeneracy is nearby.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ExactnessCertificate {
    pub double_refraction_margin: f64,
    pub containment_ok: bool,
    pub containment_radius: f64,
}

/// Certificate for a query whose shortest-path value is at most
/// `upper_bound`. Candidate geodesics live inside the ellipse
/// `{z : |source-z| + |z-target| <= upper_bound * v_eff}`; the certificate
/// checks that a ball enclosing the ellipse fits inside the sampled window.
pub fn containment_certificate(
    scene: &Scene,
    source: Point,
    target: Point,
    upper_bound: f64,
    eps: f64,
) -> ExactnessCertificate {
    let v_eff = scene.v_max().max(eps);
    let semi_major = upper_bound * v_eff / 2.0;
    let mid = (source + target).scale(0.5);
    let containment_radius = mid.dist(scene.center) + semi_major;
    ExactnessCertificate {
        double_refraction_margin: double_refraction_margin(scene, eps),
        containment_ok: containment_radius <= scene.radius,
        containment_radius,
    }
}

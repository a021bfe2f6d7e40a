//! Independent oracles shared by the integration suites. Everything here
//! recomputes expectations from first principles, without touching the
//! library's solver path.

#![allow(dead_code)]

use roadmetric_core::geometry::Point;
use roadmetric_core::sampler::Scene;
use std::cmp::Ordering;
use std::collections::BinaryHeap;

/// Golden-section minimization of a unimodal function on [a, b].
pub fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5.0_f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a) > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// Minimizer of the road-entry time functional
/// `phi(u) = |p(u) - x| / eps + (z - u) / v` (target abscissa z beyond the
/// bracket): golden-section narrows the bracket, then bisection on the
/// analytic derivative recovers the minimizer to full precision, which
/// value-based search alone cannot reach.
pub fn minimize_entry_time(
    x: Point,
    line: roadmetric_core::geometry::Line,
    v: f64,
    eps: f64,
    bracket: (f64, f64),
) -> f64 {
    let phi = |u: f64| line.point_at(u).dist(x) / eps;
    let (coarse, _) = golden_section(|u| phi(u) - u / v, bracket.0, bracket.1, 1e-6);
    let dphi = |u: f64| {
        let y = line.point_at(u);
        let foot = line.abscissa(x);
        (u - foot) / y.dist(x) / eps - 1.0 / v
    };
    let (mut lo, mut hi) = (coarse - 1e-5, coarse + 1e-5);
    assert!(
        dphi(lo) < 0.0 && dphi(hi) > 0.0,
        "derivative must bracket the root"
    );
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if dphi(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Dense log-grid minimization with golden-section refinement, for
/// functions of one positive variable.
pub fn grid_refine_min_positive(f: impl Fn(f64) -> f64 + Copy) -> f64 {
    let mut best_x = 1.0;
    let mut best = f(1.0);
    let n = 4000;
    for i in 0..=n {
        let x = 10f64.powf(-6.0 + 12.0 * i as f64 / n as f64);
        let v = f(x);
        if v < best {
            best = v;
            best_x = x;
        }
    }
    let (_, refined) = golden_section(f, best_x / 10.0, best_x * 10.0, 1e-13 * best_x.max(1.0));
    refined.min(best)
}

/// Exact invariant measure of lines meeting two disjoint balls, from the
/// overlap of normal-offset intervals integrated over directions.
pub fn two_ball_measure_exact(r: f64, s: f64, dist: f64) -> f64 {
    assert!(r + s <= dist);
    let phi0 = ((r + s) / dist).asin();
    (2.0 / std::f64::consts::PI) * ((r + s) * phi0 - dist * (1.0 - phi0.cos()))
}

// ---------------------------------------------------------------------------
// Lattice Dijkstra oracle
// ---------------------------------------------------------------------------

#[derive(PartialEq)]
struct Entry {
    dist: f64,
    node: u32,
}
impl Eq for Entry {}
impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.node.cmp(&self.node))
    }
}
impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// 16-neighbour stencil: axis, diagonal, and knight moves.
const STENCIL: [(i32, i32); 16] = [
    (1, 0),
    (0, 1),
    (-1, 0),
    (0, -1),
    (1, 1),
    (1, -1),
    (-1, 1),
    (-1, -1),
    (1, 2),
    (2, 1),
    (-1, 2),
    (-2, 1),
    (1, -2),
    (2, -1),
    (-1, -2),
    (-2, -1),
];

/// Grid shortest-path travel time between two points. Cells within half a
/// step of a road move at that road's speed, everything else at `eps`; a
/// move costs its length at the average slowness of its endpoints. The
/// terminals must lie on lattice points for the comparison to be fair.
pub fn lattice_t_eps(
    scene: &Scene,
    source: Point,
    target: Point,
    eps: f64,
    center: Point,
    half_extent: f64,
    step: f64,
) -> f64 {
    let n = (2.0 * half_extent / step).round() as i64 + 1;
    let corner = Point::new(center.x - half_extent, center.y - half_extent);
    let at = |i: i64, j: i64| Point::new(corner.x + i as f64 * step, corner.y + j as f64 * step);
    let index = |i: i64, j: i64| (j * n + i) as usize;

    let fast: Vec<_> = scene.roads().iter().filter(|r| r.v > eps).collect();
    let mut speed = vec![eps; (n * n) as usize];
    for j in 0..n {
        for i in 0..n {
            let p = at(i, j);
            for r in &fast {
                if r.line.dist_to_point(p) <= step / 2.0 && r.v > speed[index(i, j)] {
                    speed[index(i, j)] = r.v;
                }
            }
        }
    }

    let to_node = |p: Point| -> usize {
        let i = ((p.x - corner.x) / step).round() as i64;
        let j = ((p.y - corner.y) / step).round() as i64;
        assert!(
            (at(i, j).dist(p)) < 1e-9,
            "oracle terminals must sit on lattice points"
        );
        index(i, j)
    };
    let (src, tgt) = (to_node(source), to_node(target));

    let mut dist = vec![f64::INFINITY; (n * n) as usize];
    let mut done = vec![false; (n * n) as usize];
    let mut heap = BinaryHeap::new();
    dist[src] = 0.0;
    heap.push(Entry {
        dist: 0.0,
        node: src as u32,
    });
    while let Some(Entry { dist: d, node }) = heap.pop() {
        let node = node as usize;
        if done[node] {
            continue;
        }
        done[node] = true;
        if node == tgt {
            return d;
        }
        let (i, j) = (node as i64 % n, node as i64 / n);
        for (di, dj) in STENCIL {
            let (ni, nj) = (i + di as i64, j + dj as i64);
            if ni < 0 || nj < 0 || ni >= n || nj >= n {
                continue;
            }
            let next = index(ni, nj);
            if done[next] {
                continue;
            }
            let len = step * ((di * di + dj * dj) as f64).sqrt();
            let w = len * 0.5 * (1.0 / speed[node] + 1.0 / speed[next]);
            let nd = d + w;
            if nd < dist[next] {
                dist[next] = nd;
                heap.push(Entry {
                    dist: nd,
                    node: next as u32,
                });
            }
        }
    }
    dist[tgt]
}

//! Star-arm counting: the maximal number of geodesics emanating from a point
//! that stay pairwise disjoint outside a small core ball.

use crate::geometry::{Point, Segment};
use crate::sampler::Scene;
use crate::solver::geodesic_between;
use std::f64::consts::PI;

const PROBE_COUNT: usize = 24;
const DISJOINT_TOL: f64 = 1e-9;

/// Probe 24 directions at distance `delta` from `p` and count the largest
/// set of geodesics that are pairwise disjoint outside B(p, delta / 100).
pub fn star_arms(scene: &Scene, p: Point, eps: f64, delta: f64) -> usize {
    assert!(delta > 0.0);
    let core = delta / 100.0;
    let clipped: Vec<Vec<Segment>> = (0..PROBE_COUNT)
        .map(|k| {
            let angle = 2.0 * PI * k as f64 / PROBE_COUNT as f64;
            let probe = p + Point::new(angle.cos(), angle.sin()).scale(delta);
            let path = geodesic_between(scene, p, probe, eps);
            let verts = path.vertices();
            let mut segs = Vec::new();
            for w in verts.windows(2) {
                clip_segment_outside_ball(Segment::new(w[0], w[1]), p, core, &mut segs);
            }
            segs
        })
        .collect();

    // adjacency: probes whose clipped geodesics stay apart
    let mut disjoint = vec![0u32; PROBE_COUNT];
    for a in 0..PROBE_COUNT {
        for b in (a + 1)..PROBE_COUNT {
            if polylines_disjoint(&clipped[a], &clipped[b]) {
                disjoint[a] |= 1 << b;
                disjoint[b] |= 1 << a;
            }
        }
    }
    max_clique(&disjoint)
}

fn polylines_disjoint(a: &[Segment], b: &[Segment]) -> bool {
    for sa in a {
        for sb in b {
            if sa.dist_to_segment(*sb) < DISJOINT_TOL {
                return false;
            }
        }
    }
    true
}

/// Keep the parts of `seg` lying outside the closed ball B(center, r).
fn clip_segment_outside_ball(seg: Segment, center: Point, r: f64, out: &mut Vec<Segment>) {
    let d = seg.b - seg.a;
    let len2 = d.dot(d);
    if len2 == 0.0 {
        if seg.a.dist(center) > r {
            out.push(seg);
        }
        return;
    }
    // |a + t d - c|^2 = r^2
    let ac = seg.a - center;
    let qa = len2;
    let qb = 2.0 * ac.dot(d);
    let qc = ac.dot(ac) - r * r;
    let disc = qb * qb - 4.0 * qa * qc;
    if disc <= 0.0 {
        out.push(seg);
        return;
    }
    let sq = disc.sqrt();
    let t0 = ((-qb - sq) / (2.0 * qa)).clamp(0.0, 1.0);
    let t1 = ((-qb + sq) / (2.0 * qa)).clamp(0.0, 1.0);
    let at = |t: f64| seg.a + d.scale(t);
    if t0 > 0.0 {
        out.push(Segment::new(seg.a, at(t0)));
    }
    if t1 < 1.0 {
        out.push(Segment::new(at(t1), seg.b));
    }
}

/// Maximum clique on at most 32 vertices (Bron-Kerbosch with pivoting).
fn max_clique(adj: &[u32]) -> usize {
    fn bk(adj: &[u32], r_count: usize, mut p: u32, mut x: u32, best: &mut usize) {
        if p == 0 && x == 0 {
            *best = (*best).max(r_count);
            return;
        }
        if r_count + p.count_ones() as usize <= *best {
            return;
        }
        // pivot on the vertex of p | x covering the most of p
        let mut pivot = 0;
        let mut coverage = -1i32;
        let mut cand = p | x;
        while cand != 0 {
            let v = cand.trailing_zeros() as usize;
            cand &= cand - 1;
            let c = (p & adj[v]).count_ones() as i32;
            if c > coverage {
                coverage = c;
                pivot = v;
            }
        }
        let mut rest = p & !adj[pivot];
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let bit = 1u32 << v;
            bk(adj, r_count + 1, p & adj[v], x & adj[v], best);
            p &= !bit;
            x |= bit;
        }
    }
    let mut best = 0;
    let full = if adj.len() == 32 {
        u32::MAX
    } else {
        (1u32 << adj.len()) - 1
    };
    bk(adj, 0, full, 0, &mut best);
    best
}

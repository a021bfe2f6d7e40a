//! Oracle-backed checks of the geometric primitives: refraction points
//! against direct 1-D minimization, the no-shortcut infimum against grid
//! search, the two-ball measure against Monte Carlo and quadrature, and the
//! arc-polyline postconditions under random inputs.

mod support;

use proptest::prelude::*;
use roadmetric_core::geometry::{
    arc_polyline, intersect, mu_two_balls_mc, no_shortcut_inf, no_shortcut_phi, project,
    refraction_points, Line, Point, Segment,
};
use roadmetric_core::rng::SplitMix64;
use std::f64::consts::PI;
use support::{grid_refine_min_positive, two_ball_measure_exact};

#[test]
fn intersection_agrees_with_generic_solver() {
    // solve the two normal equations <p, n_k> = w_k by elimination
    let mut rng = SplitMix64::new(2);
    for _ in 0..500 {
        let l1 = Line::new(rng.uniform(0.0, PI), rng.uniform(-3.0, 3.0));
        let l2 = Line::new(rng.uniform(0.0, PI), rng.uniform(-3.0, 3.0));
        let Some(p) = intersect(l1, l2) else { continue };
        let (n1, n2) = (l1.normal(), l2.normal());
        let det = n1.x * n2.y - n1.y * n2.x;
        let x = (l1.w() * n2.y - l2.w() * n1.y) / det;
        let y = (n1.x * l2.w() - n2.x * l1.w()) / det;
        assert!((p.x - x).abs() < 1e-9 && (p.y - y).abs() < 1e-9);
    }
}

#[test]
fn refraction_matches_minimization_oracle() {
    // entry-time functional phi(u) = |y(u) - x| / eps + |z - y(u)| / v for a
    // far continuation z; its minimizer must be the refraction point
    let x = Point::new(0.0, 1.0);
    let road = Line::new(0.0, 0.0);
    let (v, eps) = (2.0, 1.0);
    let u_star = support::minimize_entry_time(x, road, v, eps, (-10.0, 10.0));
    let pts = refraction_points(x, road, v, eps).unwrap();
    let expect = 1.0 / 3.0_f64.sqrt();
    assert!((u_star - expect).abs() < 1e-9, "oracle minimizer {u_star}");
    assert!(pts.iter().any(|p| (p.x - u_star).abs() < 1e-9));
}

#[test]
fn refraction_matches_minimization_oracle_random() {
    let mut rng = SplitMix64::new(4242);
    let mut checked = 0;
    while checked < 50 {
        let line = Line::new(rng.uniform(0.0, PI), rng.uniform(-2.0, 2.0));
        let x = Point::new(rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0));
        if line.dist_to_point(x) < 1e-3 {
            continue;
        }
        let v = rng.uniform(0.5, 6.0);
        let eps = v * rng.uniform(0.1, 0.9);
        let Some(pts) = refraction_points(x, line, v, eps) else {
            continue;
        };
        let foot = line.abscissa(x);
        let u_star = support::minimize_entry_time(x, line, v, eps, (foot - 50.0, foot + 50.0));
        // the oracle walks toward increasing abscissae: matches the + point
        let plus = pts
            .iter()
            .map(|p| line.abscissa(*p))
            .fold(f64::NEG_INFINITY, f64::max);
        assert!((u_star - plus).abs() < 1e-9, "{u_star} vs {plus}");
        checked += 1;
    }
}

#[test]
fn refraction_points_are_global_minimizers() {
    // random instances: the better refraction candidate beats 200 random
    // interior points of the road
    let mut rng = SplitMix64::new(1515);
    for _ in 0..1000 {
        let line = Line::new(rng.uniform(0.0, PI), rng.uniform(-2.0, 2.0));
        let x = Point::new(rng.uniform(-4.0, 4.0), rng.uniform(-4.0, 4.0));
        if line.dist_to_point(x) < 1e-6 {
            continue;
        }
        let v = rng.uniform(0.2, 8.0);
        let eps = v * rng.uniform(0.05, 0.95);
        let Some(candidates) = refraction_points(x, line, v, eps) else {
            continue;
        };
        // far continuation beyond both candidates
        let foot = line.abscissa(x);
        let z = foot + rng.uniform(20.0, 40.0);
        let phi = |u: f64| line.point_at(u).dist(x) / eps + (z - u).abs() / v;
        let best_candidate = candidates
            .iter()
            .map(|p| phi(line.abscissa(*p)))
            .fold(f64::INFINITY, f64::min);
        for _ in 0..200 {
            let u = rng.uniform(foot - 10.0, foot + 10.0);
            assert!(
                best_candidate <= phi(u) + 1e-9,
                "interior point beats the refraction candidates"
            );
        }
    }
}

#[test]
fn no_shortcut_matches_grid_oracle() {
    let cases = [
        (0.0, 1.0, 1.0),
        (0.3, 2.0, 1.0),
        (0.9, 5.0, 0.2),
        (0.5, 1.0, 1.0),
        (0.99, 3.0, 2.9),
    ];
    for (dot, v1, v2) in cases {
        let closed = no_shortcut_inf(dot, v1, v2).unwrap();
        let grid = grid_refine_min_positive(|rho| no_shortcut_phi(rho, dot, v1, v2));
        assert!(
            (closed - grid).abs() <= 1e-9 * closed.max(1e-9),
            "dot={dot}: closed {closed} vs grid {grid}"
        );
    }
}

#[test]
fn two_ball_mc_is_consistent_and_bracketed() {
    let c1 = Point::ORIGIN;
    let c2 = Point::new(1.0, 0.0);
    let (r, s) = (0.1, 0.1);
    let a = mu_two_balls_mc(c1, r, c2, s, 1_000_000, 7).unwrap();
    let b = mu_two_balls_mc(c1, r, c2, s, 1_000_000, 8).unwrap();
    let spread = (a.std_err * a.std_err + b.std_err * b.std_err).sqrt();
    assert!(
        (a.value - b.value).abs() <= 3.0 * spread,
        "two MC runs disagree"
    );

    // quadrature oracle plus the coarse bracket c rs/D <= mu <= C rs/D
    let exact = two_ball_measure_exact(r, s, 1.0);
    assert!((a.value - exact).abs() <= 4.0 * a.std_err);
    let ratio = exact / (r * s / 1.0);
    assert!(
        ratio > 1.0 && ratio < 2.0,
        "bracket constants hold: {ratio}"
    );
}

#[test]
fn two_ball_mc_edge_cases() {
    let c1 = Point::ORIGIN;
    let c2 = Point::new(1.0, 0.0);
    // null target ball
    let z = mu_two_balls_mc(c1, 0.2, c2, 0.0, 10_000, 1).unwrap();
    assert_eq!(z.value, 0.0);
    // symmetry under swapping the balls
    let a = mu_two_balls_mc(c1, 0.15, c2, 0.25, 400_000, 2).unwrap();
    let b = mu_two_balls_mc(c2, 0.25, c1, 0.15, 400_000, 3).unwrap();
    let spread = (a.std_err * a.std_err + b.std_err * b.std_err).sqrt();
    assert!((a.value - b.value).abs() <= 3.0 * spread);
    // overlapping balls rejected
    assert!(mu_two_balls_mc(c1, 0.6, c2, 0.6, 100, 4).is_err());
}

#[test]
fn projection_displacement_is_orthogonal() {
    let mut rng = SplitMix64::new(321);
    for _ in 0..300 {
        let l = Line::new(rng.uniform(0.0, PI), rng.uniform(-5.0, 5.0));
        let p = Point::new(rng.uniform(-8.0, 8.0), rng.uniform(-8.0, 8.0));
        let q = project(p, l);
        assert!(l.dist_to_point(q) < 1e-12);
        assert!((p - q).dot(l.dir()).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn arc_polyline_postconditions(
        a in 0.0..(2.0 * PI),
        b in 0.0..(2.0 * PI),
        rho in 0.01..0.99f64,
    ) {
        let x = Point::new(a.cos(), a.sin());
        let y = Point::new(b.cos(), b.sin());
        let arc = arc_polyline(x, y, rho).unwrap();
        prop_assert!(arc.total_length <= PI + 1e-9);
        let bound = (PI / (2.0 * rho.acos())).ceil() as usize + 1;
        prop_assert!(arc.vertices.len() <= bound);
        for v in &arc.vertices {
            prop_assert!((v.norm() - 1.0).abs() < 1e-12);
        }
        for w in arc.vertices.windows(2) {
            prop_assert!(w[0] != w[1]);
            let d = Segment::new(w[0], w[1]).dist_to_point(Point::ORIGIN);
            prop_assert!(d > rho, "chord clearance {} <= {}", d, rho);
        }
        let sum: f64 = arc.vertices.windows(2).map(|w| w[0].dist(w[1])).sum();
        prop_assert!((sum - arc.total_length).abs() < 1e-12);
    }

    #[test]
    fn line_chart_canonical_and_stable(theta in -10.0..10.0f64, w in -5.0..5.0f64) {
        let l = Line::new(theta, w);
        prop_assert!(l.theta() >= 0.0 && l.theta() < PI);
        // canonicalization is idempotent
        let l2 = Line::new(l.theta(), l.w());
        prop_assert_eq!(l.theta().to_bits(), l2.theta().to_bits());
        prop_assert_eq!(l.w().to_bits(), l2.w().to_bits());
    }
}

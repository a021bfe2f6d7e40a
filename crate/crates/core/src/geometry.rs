//! Planar lines, intersections, projections, refraction solutions, and the
//! invariant line-measure formulas shared by every other module.
//!
//! Lines are kept in a canonical (theta, w) chart: `theta` in [0, pi) is the
//! direction angle, `w` the signed offset along the unit normal
//! (-sin theta, cos theta) from the origin. Two lines are equal iff their
//! canonical charts are equal, which gives usable hash/dedup keys.

use crate::error::{Error, Result};
use crate::rng::SplitMix64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Angular tolerance below which two directions count as parallel.
/// The road process almost surely contains no exactly-parallel pair, so this
/// only guards floating-point noise.
pub const PARALLEL_TOL: f64 = 1e-12;

/// Euclidean tolerance (meters) for on-line membership tests and snapping.
pub const GEOM_TOL: f64 = 1e-9;

// ---------------------------------------------------------------------------
// Points and segments
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub const ORIGIN: Point = Point::new(0.0, 0.0);

    #[inline]
    pub fn dot(self, other: Point) -> f64 {
        self.x * other.x + self.y * other.y
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    #[inline]
    pub fn dist(self, other: Point) -> f64 {
        (self - other).norm()
    }

    #[inline]
    pub fn scale(self, s: f64) -> Point {
        Point::new(self.x * s, self.y * s)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Exact bit pattern, used as a hash/dedup key for coalescence tries.
    pub fn bits(self) -> (u64, u64) {
        (self.x.to_bits(), self.y.to_bits())
    }
}

impl std::ops::Add for Point {
    type Output = Point;
    fn add(self, rhs: Point) -> Point {
        Point::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl std::ops::Sub for Point {
    type Output = Point;
    fn sub(self, rhs: Point) -> Point {
        Point::new(self.x - rhs.x, self.y - rhs.y)
    }
}

/// Straight segment; degenerate (a == b) is allowed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Segment {
    pub a: Point,
    pub b: Point,
}

impl Segment {
    pub fn new(a: Point, b: Point) -> Self {
        Self { a, b }
    }

    pub fn length(self) -> f64 {
        self.a.dist(self.b)
    }

    /// Distance from `p` to the closest point of the segment.
    pub fn dist_to_point(self, p: Point) -> f64 {
        let d = self.b - self.a;
        let len2 = d.dot(d);
        if len2 == 0.0 {
            return p.dist(self.a);
        }
        let t = ((p - self.a).dot(d) / len2).clamp(0.0, 1.0);
        p.dist(self.a + d.scale(t))
    }

    /// Minimal distance between two segments (0 when they cross).
    pub fn dist_to_segment(self, other: Segment) -> f64 {
        if segments_cross(self, other) {
            return 0.0;
        }
        self.dist_to_point(other.a)
            .min(self.dist_to_point(other.b))
            .min(other.dist_to_point(self.a))
            .min(other.dist_to_point(self.b))
    }
}

fn orient(a: Point, b: Point, c: Point) -> f64 {
    (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)
}

fn segments_cross(s: Segment, t: Segment) -> bool {
    let d1 = orient(t.a, t.b, s.a);
    let d2 = orient(t.a, t.b, s.b);
    let d3 = orient(s.a, s.b, t.a);
    let d4 = orient(s.a, s.b, t.b);
    ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
}

// ---------------------------------------------------------------------------
// Lines
// ---------------------------------------------------------------------------

/// Affine line in the canonical (theta, w) chart.
///
/// The point set is `{ t*(cos theta, sin theta) + w*(-sin theta, cos theta) }`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Line {
    theta: f64,
    w: f64,
}

impl Line {
    /// Build a line, canonicalizing theta into [0, pi). Flipping theta by pi
    /// negates the unit normal, so w flips sign with it.
    pub fn new(theta: f64, w: f64) -> Self {
        let mut t = theta.rem_euclid(PI);
        // rem_euclid can return exactly PI after rounding for tiny negatives
        if t >= PI {
            t -= PI;
        }
        // count the half-turns removed to know whether the normal flipped
        let turns = ((theta - t) / PI).round() as i64;
        let w = if turns.rem_euclid(2) == 0 { w } else { -w };
        Self { theta: t, w }
    }

    /// Line through `p` with direction angle `theta`.
    pub fn through(p: Point, theta: f64) -> Self {
        let canon = Line::new(theta, 0.0);
        let n = canon.normal();
        Line {
            theta: canon.theta,
            w: p.dot(n),
        }
    }

    pub fn theta(self) -> f64 {
        self.theta
    }

    pub fn w(self) -> f64 {
        self.w
    }

    /// Unit direction vector.
    #[inline]
    pub fn dir(self) -> Point {
        Point::new(self.theta.cos(), self.theta.sin())
    }

    /// Unit normal vector (-sin theta, cos theta).
    #[inline]
    pub fn normal(self) -> Point {
        Point::new(-self.theta.sin(), self.theta.cos())
    }

    /// Point at abscissa `t` along the direction.
    #[inline]
    pub fn point_at(self, t: f64) -> Point {
        let d = self.dir();
        let n = self.normal();
        Point::new(t * d.x + self.w * n.x, t * d.y + self.w * n.y)
    }

    /// Abscissa of the projection of `p` onto the line.
    #[inline]
    pub fn abscissa(self, p: Point) -> f64 {
        p.dot(self.dir())
    }

    /// Signed distance from `p` to the line (along the normal).
    #[inline]
    pub fn signed_offset(self, p: Point) -> f64 {
        p.dot(self.normal()) - self.w
    }

    #[inline]
    pub fn dist_to_point(self, p: Point) -> f64 {
        self.signed_offset(p).abs()
    }

    pub fn contains(self, p: Point, tol: f64) -> bool {
        self.dist_to_point(p) <= tol
    }

    /// Whether the line meets the closed ball B(center, radius).
    #[inline]
    pub fn hits_ball(self, center: Point, radius: f64) -> bool {
        self.dist_to_point(center) <= radius
    }

    pub fn is_parallel_to(self, other: Line) -> bool {
        let d = (self.theta - other.theta).abs();
        d < PARALLEL_TOL || (PI - d) < PARALLEL_TOL
    }

    /// Apply the plane map `p -> anchor + ratio * p` to this line.
    pub fn scaled(self, anchor: Point, ratio: f64) -> Line {
        // direction unchanged; the normal offset scales and translates
        Line {
            theta: self.theta,
            w: ratio * self.w + anchor.dot(self.normal()),
        }
    }
}

/// Intersection of two canonical lines; `None` marks a parallel pair.
pub fn intersect(l1: Line, l2: Line) -> Option<Point> {
    if l1.is_parallel_to(l2) {
        return None;
    }
    // solve <p, n1> = w1, <p, n2> = w2 by Cramer's rule
    let (s1, c1) = l1.theta.sin_cos();
    let (s2, c2) = l2.theta.sin_cos();
    let det = (l2.theta - l1.theta).sin();
    let x = (l1.w * c2 - l2.w * c1) / det;
    let y = (l1.w * s2 - l2.w * s1) / det;
    Some(Point::new(x, y))
}

/// Orthogonal projection of `p` onto `l`.
pub fn project(p: Point, l: Line) -> Point {
    l.point_at(l.abscissa(p))
}

// ---------------------------------------------------------------------------
// Invariant line measure
// ---------------------------------------------------------------------------

/// Measure of the set of lines hitting a closed ball of radius `r`:
/// `upsilon_1 * r = 2 r` in the plane.
pub fn mu_ball(r: f64) -> Result<f64> {
    if r.is_nan() || r < 0.0 {
        return Err(Error::invalid("r", format!("radius must be >= 0, got {r}")));
    }
    Ok(2.0 * r)
}

/// Monte-Carlo estimate with its standard error.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct McEstimate {
    pub value: f64,
    pub std_err: f64,
}

/// Unbiased Monte-Carlo estimate of the measure of lines hitting both
/// B(c1, r) and B(c2, s): lines through B(c1, r) carry total mass `2 r`, so
/// the estimate is `2 r` times the empirical hit fraction on B(c2, s).
pub fn mu_two_balls_mc(
    c1: Point,
    r: f64,
    c2: Point,
    s: f64,
    n: u64,
    seed: u64,
) -> Result<McEstimate> {
    let dist = c1.dist(c2);
    if r + s > dist || r > dist || s > dist {
        return Err(Error::OverlappingBalls { r, s, dist });
    }
    if n == 0 {
        return Err(Error::invalid("n", "sample count must be positive"));
    }
    let mut rng = SplitMix64::substream(seed, 0);
    let mut hits = 0u64;
    for _ in 0..n {
        let theta = rng.uniform(0.0, PI);
        let normal = Point::new(-theta.sin(), theta.cos());
        let w = c1.dot(normal) + rng.uniform(-r, r);
        if (c2.dot(normal) - w).abs() <= s {
            hits += 1;
        }
    }
    let p = hits as f64 / n as f64;
    let mass = 2.0 * r;
    Ok(McEstimate {
        value: mass * p,
        std_err: mass * (p * (1.0 - p) / n as f64).sqrt(),
    })
}

// ---------------------------------------------------------------------------
// Refraction and road-to-road functionals
// ---------------------------------------------------------------------------

/// The two optimal entry points from `x` onto road `l` with speed `v`, for
/// off-road speed `eps`: points y on l with |cos(angle(y - x, l))| = eps / v.
/// They sit symmetrically about the foot of the perpendicular at abscissa
/// offset `h * q / sqrt(1 - q^2)` where `h = dist(x, l)` and `q = eps / v`.
/// Empty when eps >= v (the road is no faster than driving) or x lies on l.
pub fn refraction_points(x: Point, l: Line, v: f64, eps: f64) -> Option<[Point; 2]> {
    debug_assert!(eps > 0.0 && v > 0.0);
    if eps >= v {
        return None;
    }
    let h = l.dist_to_point(x);
    if h < GEOM_TOL {
        return None;
    }
    let q = eps / v;
    let span = h * q / (1.0 - q * q).sqrt();
    let foot = l.abscissa(x);
    Some([l.point_at(foot + span), l.point_at(foot - span)])
}

/// Speed of progress of road `l` transverse to `reference`:
/// |sin(angle between them)| * v.
pub fn vertical_speed(l: Line, v: f64, reference: Line) -> f64 {
    l.dir().dot(reference.normal()).abs() * v
}

/// Half-length factor of the trace that the r-neighbourhood of `l` leaves on
/// `reference`: 1 / |sin(angle)|, infinite for parallel lines.
pub fn psi(l: Line, reference: Line) -> f64 {
    let s = l.dir().dot(reference.normal()).abs();
    if s < PARALLEL_TOL {
        f64::INFINITY
    } else {
        1.0 / s
    }
}

/// Infimum over rho in (0, inf) of
/// `phi(rho) = sqrt(1 - 2 dot rho + rho^2) / (1 / v1 + rho / v2)`,
/// the largest off-road speed for which driving straight between two crossing
/// roads never beats driving through their intersection. The infimum is
/// attained at `rho* = (v1 + dot v2) / (v2 + dot v1)`.
pub fn no_shortcut_inf(dot: f64, v1: f64, v2: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&dot) {
        return Err(Error::invalid(
            "dot",
            format!("must lie in [0, 1], got {dot}"),
        ));
    }
    if !(v1 >= v2 && v2 > 0.0) {
        return Err(Error::invalid(
            "v1, v2",
            format!("need v1 >= v2 > 0, got {v1}, {v2}"),
        ));
    }
    let rho = (v1 + dot * v2) / (v2 + dot * v1);
    Ok(no_shortcut_phi(rho, dot, v1, v2))
}

/// The no-shortcut functional itself, exposed for boundary checks.
pub fn no_shortcut_phi(rho: f64, dot: f64, v1: f64, v2: f64) -> f64 {
    let radicand = (1.0 - 2.0 * dot * rho + rho * rho).max(0.0);
    radicand.sqrt() / (1.0 / v1 + rho / v2)
}

// ---------------------------------------------------------------------------
// Arc approximation by chords
// ---------------------------------------------------------------------------

/// Polyline on the unit circle approximating an arc while keeping every
/// chord at distance greater than some rho from the origin.
#[derive(Clone, Debug)]
pub struct ArcPolyline {
    pub vertices: Vec<Point>,
    pub total_length: f64,
}

/// Chord sequence from `x` to `y` on the unit circle such that every chord
/// stays at distance > `rho` from the origin. Walks the shorter arc (ties
/// counterclockwise) in equal angular steps below `2 arccos(rho)`, so the
/// total length is at most pi and the vertex count at most
/// `ceil(pi / (2 arccos rho)) + 1`.
pub fn arc_polyline(x: Point, y: Point, rho: f64) -> Result<ArcPolyline> {
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::invalid(
            "rho",
            format!("must lie in (0, 1), got {rho}"),
        ));
    }
    debug_assert!((x.norm() - 1.0).abs() < 1e-9 && (y.norm() - 1.0).abs() < 1e-9);
    let a = x.y.atan2(x.x);
    let b = y.y.atan2(y.x);
    let mut delta = b - a;
    while delta > PI {
        delta -= 2.0 * PI;
    }
    while delta <= -PI {
        delta += 2.0 * PI;
    }
    if delta == 0.0 && x == y {
        return Ok(ArcPolyline {
            vertices: vec![x],
            total_length: 0.0,
        });
    }
    let step_max = 2.0 * rho.acos();
    let mut k = ((delta.abs() / step_max).ceil() as usize).max(1);
    // enforce strict chord clearance; ceil can land exactly on the bound
    if ((delta.abs() / k as f64) / 2.0).cos() <= rho {
        k += 1;
    }
    let mut vertices = Vec::with_capacity(k + 1);
    vertices.push(x);
    for i in 1..k {
        let phi = a + delta * (i as f64 / k as f64);
        vertices.push(Point::new(phi.cos(), phi.sin()));
    }
    vertices.push(y);
    let total_length = vertices.windows(2).map(|p| p[0].dist(p[1])).sum();
    Ok(ArcPolyline {
        vertices,
        total_length,
    })
}

// ---------------------------------------------------------------------------
// Ellipse support (containment certificates, full-mode hop regions)
// ---------------------------------------------------------------------------

/// Ellipse given by its foci and the sum of focal distances.
#[derive(Clone, Copy, Debug)]
pub struct Ellipse {
    pub center: Point,
    axis: Point,
    pub semi_major: f64,
    pub semi_minor: f64,
}

impl Ellipse {
    /// `None` when the focal sum cannot enclose the foci (degenerate).
    pub fn from_foci(f1: Point, f2: Point, focal_sum: f64) -> Option<Ellipse> {
        let c = f1.dist(f2) / 2.0;
        let a = focal_sum / 2.0;
        if !(a.is_finite() && a >= c) {
            return None;
        }
        let axis = if c > 0.0 {
            (f2 - f1).scale(1.0 / (2.0 * c))
        } else {
            Point::new(1.0, 0.0)
        };
        Some(Ellipse {
            center: (f1 + f2).scale(0.5),
            axis,
            semi_major: a,
            semi_minor: (a * a - c * c).max(0.0).sqrt(),
        })
    }

    pub fn contains(&self, p: Point) -> bool {
        if self.semi_minor == 0.0 {
            return false;
        }
        let d = p - self.center;
        let xi = d.dot(self.axis) / self.semi_major;
        let eta = (d.x * (-self.axis.y) + d.y * self.axis.x) / self.semi_minor;
        xi * xi + eta * eta <= 1.0
    }

    /// Abscissa interval of the line chord inside the ellipse, if any.
    pub fn line_chord(&self, l: Line) -> Option<(f64, f64)> {
        if self.semi_minor <= 0.0 {
            return None;
        }
        let p0 = l.point_at(0.0) - self.center;
        let d = l.dir();
        let perp = Point::new(-self.axis.y, self.axis.x);
        let xi0 = p0.dot(self.axis) / self.semi_major;
        let xid = d.dot(self.axis) / self.semi_major;
        let eta0 = p0.dot(perp) / self.semi_minor;
        let etad = d.dot(perp) / self.semi_minor;
        // (xi0 + t xid)^2 + (eta0 + t etad)^2 = 1
        let qa = xid * xid + etad * etad;
        let qb = 2.0 * (xi0 * xid + eta0 * etad);
        let qc = xi0 * xi0 + eta0 * eta0 - 1.0;
        let disc = qb * qb - 4.0 * qa * qc;
        if disc <= 0.0 || qa == 0.0 {
            return None;
        }
        let sq = disc.sqrt();
        Some(((-qb - sq) / (2.0 * qa), (-qb + sq) / (2.0 * qa)))
    }
}

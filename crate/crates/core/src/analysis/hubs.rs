//! Hub verification at road intersections: once the off-road speed sits
//! below the no-shortcut threshold of the pair and no third road interferes
//! nearby, every concatenation of two arms through the intersection is a
//! geodesic.

use crate::error::{Error, Result};
use crate::geometry::{intersect, no_shortcut_inf, Point};
use crate::sampler::Scene;
use crate::solver::distance_between;
use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct HubReport {
    pub intersection: Point,
    pub road_i: u64,
    pub road_j: u64,
    pub v_i: f64,
    pub v_j: f64,
    /// Infimum of the no-shortcut functional for this pair.
    pub inf_phi: f64,
    pub eps_used: f64,
    /// Arm half-length actually used after shrinking.
    pub delta: f64,
    /// Preconditions held: eps below threshold, no interfering third road,
    /// working ball inside the window.
    pub applicable: bool,
    /// Solver times between the four arm endpoints (order: +i, -i, +j, -j).
    pub arm_times: [[f64; 4]; 4],
    /// Every pair's through-intersection time matched the solver to 1e-9.
    pub all_geodesic: bool,
}

/// Check the hub property at the intersection of roads `i` and `j`, with the
/// relaxation speed chosen automatically below the no-shortcut threshold.
pub fn hub_check(scene: &Scene, i: u64, j: u64, delta: f64) -> Result<HubReport> {
    hub_check_impl(scene, i, j, delta, None)
}

/// Same check with an explicit relaxation speed; reports `applicable: false`
/// when that speed violates the no-shortcut precondition.
pub fn hub_check_with_eps(
    scene: &Scene,
    i: u64,
    j: u64,
    delta: f64,
    eps: f64,
) -> Result<HubReport> {
    hub_check_impl(scene, i, j, delta, Some(eps))
}

fn hub_check_impl(
    scene: &Scene,
    i: u64,
    j: u64,
    delta: f64,
    eps_override: Option<f64>,
) -> Result<HubReport> {
    if delta <= 0.0 {
        return Err(Error::invalid("delta", "must be positive"));
    }
    let road_i = scene
        .roads()
        .iter()
        .find(|r| r.id == i)
        .ok_or_else(|| Error::invalid("i", format!("no road with id {i}")))?;
    let road_j = scene
        .roads()
        .iter()
        .find(|r| r.id == j)
        .ok_or_else(|| Error::invalid("j", format!("no road with id {j}")))?;
    let x = intersect(road_i.line, road_j.line).ok_or(Error::ParallelRoads { i, j })?;

    let dot = road_i.line.dir().dot(road_j.line.dir()).abs();
    let (v1, v2) = if road_i.v >= road_j.v {
        (road_i.v, road_j.v)
    } else {
        (road_j.v, road_i.v)
    };
    let inf_phi = no_shortcut_inf(dot, v1, v2)?;
    let eps_used = eps_override.unwrap_or_else(|| (0.9 * inf_phi).max(scene.v_min));
    let mut applicable = eps_used < inf_phi && eps_used < v2 && eps_used >= scene.v_min;

    // shrink delta until the working ball is clean and inside the window
    let ball_factor = 1.0 + 2.0 * v1 / v2;
    let mut delta = delta;
    if applicable {
        let mut ok = false;
        for _ in 0..60 {
            let ball = ball_factor * delta;
            let inside_window = x.dist(scene.center) + ball <= scene.radius;
            let interference = scene.roads().iter().any(|r| {
                r.id != i && r.id != j && r.v > eps_used && r.line.dist_to_point(x) <= ball
            });
            if inside_window && !interference {
                ok = true;
                break;
            }
            delta /= 2.0;
        }
        applicable = ok;
    }

    // arm endpoints at distance delta along each road
    let arms = [
        (x + road_i.line.dir().scale(delta), road_i.v),
        (x + road_i.line.dir().scale(-delta), road_i.v),
        (x + road_j.line.dir().scale(delta), road_j.v),
        (x + road_j.line.dir().scale(-delta), road_j.v),
    ];

    let mut arm_times = [[0.0; 4]; 4];
    let mut all_geodesic = applicable;
    if applicable {
        for a in 0..4 {
            for b in (a + 1)..4 {
                let solver_time = distance_between(scene, arms[a].0, arms[b].0, eps_used);
                arm_times[a][b] = solver_time;
                arm_times[b][a] = solver_time;
                let through = arms[a].0.dist(x) / arms[a].1 + x.dist(arms[b].0) / arms[b].1;
                if (solver_time - through).abs() > 1e-9 {
                    all_geodesic = false;
                }
            }
        }
    }
    Ok(HubReport {
        intersection: x,
        road_i: i,
        road_j: j,
        v_i: road_i.v,
        v_j: road_j.v,
        inf_phi,
        eps_used,
        delta,
        applicable,
        arm_times,
        all_geodesic,
    })
}

/// Through-intersection driving time assembled as a two-segment path;
/// the arithmetic route `|a1|/v1 + |a2|/v2` must agree to 1e-12.
pub fn through_time_assembled(x: Point, a: Point, va: f64, b: Point, vb: f64) -> f64 {
    let leg1 = a.dist(x) / va;
    let leg2 = x.dist(b) / vb;
    leg1 + leg2
}

//! No-pause verification: across an eps sweep, the interior of a geodesic
//! (the part between its first and last road segments) should settle on a
//! fixed road sequence whose slowest road stays above the relaxation speed.

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::sampler::Scene;
use crate::solver::{geodesic_between, GeodesicPath, SegmentMode};
use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct PauseProfile {
    /// Slowest road speed on the stabilized interior; absent when the path
    /// never uses a road.
    pub interior_min_speed: Option<f64>,
    /// (cumulative time at segment start, segment speed) along the final
    /// sweep level's geodesic.
    pub endpoint_speed_decay: Vec<(f64, f64)>,
    /// Interior road sequence identical across the last two sweep levels.
    pub stabilized: bool,
    pub eps_list: Vec<f64>,
}

/// Road ids of the interior plus the exact junction vertices between
/// consecutive road segments. Junctions are road intersections, so their
/// coordinates do not move with eps; refraction endpoints (which do move)
/// are excluded.
fn interior_signature(path: &GeodesicPath) -> (Vec<u64>, Vec<(u64, u64)>) {
    let mut roads = Vec::new();
    let mut junctions = Vec::new();
    let mut prev_road_end: Option<Point> = None;
    for seg in &path.segments {
        if let SegmentMode::Road { id, .. } = seg.mode {
            if let Some(end) = prev_road_end {
                if end.bits() == seg.from.bits() {
                    junctions.push(end.bits());
                }
            }
            roads.push(id);
            prev_road_end = Some(seg.to);
        }
    }
    (roads, junctions)
}

/// Sweep the query across strictly decreasing eps values and report whether
/// the interior stabilizes.
pub fn no_pause_profile(
    scene: &Scene,
    x: Point,
    y: Point,
    eps_list: &[f64],
) -> Result<PauseProfile> {
    if eps_list.len() < 2 {
        return Err(Error::invalid("eps_list", "need at least two sweep levels"));
    }
    for pair in eps_list.windows(2) {
        if pair[1] >= pair[0] {
            return Err(Error::invalid("eps_list", "must be strictly decreasing"));
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
    let paths: Vec<GeodesicPath> = eps_list
        .iter()
        .map(|&eps| geodesic_between(scene, x, y, eps))
        .collect();
    let signatures: Vec<_> = paths.iter().map(interior_signature).collect();
    let last = paths.last().unwrap();
    let stabilized = signatures[signatures.len() - 1] == signatures[signatures.len() - 2];
    let interior_min_speed = last
        .segments
        .iter()
        .filter_map(|s| match s.mode {
            SegmentMode::Road { v, .. } => Some(v),
            SegmentMode::Straight { .. } => None,
        })
        .min_by(f64::total_cmp);
    let mut decay = Vec::with_capacity(last.segments.len());
    let mut clock = 0.0;
    for seg in &last.segments {
        decay.push((clock, seg.mode.speed()));
        clock += seg.time;
    }
    Ok(PauseProfile {
        interior_min_speed,
        endpoint_speed_decay: decay,
        stabilized,
        eps_list: eps_list.to_vec(),
    })
}

/// Structure audit: straight segments may only open or close a geodesic.
pub fn structure_check(path: &GeodesicPath) -> bool {
    let n = path.segments.len();
    path.segments
        .iter()
        .enumerate()
        .all(|(i, seg)| matches!(seg.mode, SegmentMode::Road { .. }) || i == 0 || i == n - 1)
}

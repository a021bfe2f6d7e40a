//! Cut-locus scanning: grid points admitting several near-optimal geodesics
//! to a fixed origin.

use crate::geometry::Point;
use crate::sampler::Scene;
use crate::solver::k_near_geodesics;
use rayon::prelude::*;
use serde::Serialize;

/// Rectangular scan grid of points `center + (i, j) * spacing`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct GridSpec {
    pub center: Point,
    pub half_width: f64,
    pub half_height: f64,
    pub spacing: f64,
}

impl GridSpec {
    pub fn points(&self) -> Vec<Point> {
        let nx = (self.half_width / self.spacing).floor() as i64;
        let ny = (self.half_height / self.spacing).floor() as i64;
        let mut out = Vec::new();
        for j in -ny..=ny {
            for i in -nx..=nx {
                out.push(Point::new(
                    self.center.x + i as f64 * self.spacing,
                    self.center.y + j as f64 * self.spacing,
                ));
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct CutHit {
    pub point: Point,
    /// Number of geometrically distinct near-optimal geodesics found (>= 2).
    pub multiplicity: u32,
    /// Time gap between the best and second-best distinct geodesics.
    pub time_gap: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CutLocusSample {
    pub origin: Point,
    pub eps: f64,
    pub hits: Vec<CutHit>,
    pub scanned: u64,
}

/// Scan the grid for points with at least two distinct geodesics to the
/// origin within `slack`. `None` uses the default slack `1e-6 * t_eps` per
/// query. Multiplicity-3 hits are recoverable from the `multiplicity` field.
pub fn cut_locus_scan(
    scene: &Scene,
    origin: Point,
    grid: GridSpec,
    eps: f64,
    slack: Option<f64>,
) -> CutLocusSample {
    let points = grid.points();
    let hits: Vec<Option<CutHit>> = points
        .par_iter()
        .map(|&p| {
            if p.bits() == origin.bits() {
                return None;
            }
            let slack_abs = match slack {
                Some(s) => s,
                None => 1e-6 * crate::solver::distance_between(scene, origin, p, eps),
            };
            let paths = k_near_geodesics(scene, origin, p, eps, 3, slack_abs);
            if paths.len() >= 2 {
                Some(CutHit {
                    point: p,
                    multiplicity: paths.len() as u32,
                    time_gap: paths[1].total_time - paths[0].total_time,
                })
            } else {
                None
            }
        })
        .collect();
    CutLocusSample {
        origin,
        eps,
        hits: hits.into_iter().flatten().collect(),
        scanned: points.len() as u64,
    }
}

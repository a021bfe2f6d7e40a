//! Travel-time field around a center point, computed by one multi-target
//! run over the query graph augmented with a grid of terminals.

use crate::eps_graph::build_graph_multi;
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::sampler::Scene;
use crate::solver::distances_from_source;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BallRaster {
    pub center: Point,
    pub eps: f64,
    pub resolution: u32,
    /// Lower-left corner of the rastered square (the scene window).
    pub corner: Point,
    pub spacing: f64,
    /// Iso levels (seconds) recorded for rendering.
    pub radii: Vec<f64>,
    /// Row-major travel times to each cell center, south row first.
    pub times: Vec<f64>,
}

/// Raster of `t_eps(center, cell)` over the scene window. Every cell gets
/// its own refraction nodes, so each value is the exact relaxed distance.
/// Sublevel sets are nested by construction (they are sublevels of one
/// scalar field).
pub fn ball_raster(
    scene: &Scene,
    center: Point,
    eps: f64,
    radii: &[f64],
    resolution: u32,
) -> Result<BallRaster> {
    if resolution < 32 {
        return Err(Error::invalid(
            "resolution",
            "need at least 32 cells per side",
        ));
    }
    let spacing = 2.0 * scene.radius / resolution as f64;
    let corner = Point::new(scene.center.x - scene.radius, scene.center.y - scene.radius);
    let mut cells = Vec::with_capacity((resolution * resolution) as usize);
    for j in 0..resolution {
        for i in 0..resolution {
            cells.push(Point::new(
                corner.x + (i as f64 + 0.5) * spacing,
                corner.y + (j as f64 + 0.5) * spacing,
            ));
        }
    }
    let g = build_graph_multi(scene, center, &cells, eps);
    let dist = distances_from_source(&g);
    let times = g.targets.iter().map(|&t| dist[t as usize]).collect();
    Ok(BallRaster {
        center,
        eps,
        resolution,
        corner,
        spacing,
        radii: radii.to_vec(),
        times,
    })
}

impl BallRaster {
    pub fn cell_center(&self, i: u32, j: u32) -> Point {
        Point::new(
            self.corner.x + (i as f64 + 0.5) * self.spacing,
            self.corner.y + (j as f64 + 0.5) * self.spacing,
        )
    }

    pub fn time_at(&self, i: u32, j: u32) -> f64 {
        self.times[(j * self.resolution + i) as usize]
    }

    pub fn max_finite_time(&self) -> f64 {
        self.times
            .iter()
            .copied()
            .filter(|t| t.is_finite())
            .fold(0.0, f64::max)
    }
}

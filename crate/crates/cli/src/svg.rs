//! Deterministic SVG rendering of scenes, geodesics, ball rasters, and
//! point markers. The viewport is the scene window; outputs are plain
//! SVG 1.1 with fixed-precision coordinates so identical inputs produce
//! identical bytes.

use roadmetric_core::analysis::BallRaster;
use roadmetric_core::geometry::Point;
use roadmetric_core::sampler::Scene;
use roadmetric_core::solver::GeodesicPath;
use std::fmt::Write;

#[derive(Default)]
pub struct Overlays<'a> {
    pub paths: &'a [GeodesicPath],
    pub raster: Option<&'a BallRaster>,
    pub points: &'a [Point],
}

fn fmt(x: f64) -> String {
    format!("{x:.6}")
}

/// Map to SVG user space: y axis flipped so north stays up.
fn map(p: Point) -> (f64, f64) {
    (p.x, -p.y)
}

/// Blue-to-red ramp indexed linearly over [0, 1].
fn ramp(t: f64) -> String {
    let t = t.clamp(0.0, 1.0);
    let r = (40.0 + t * 180.0).round() as u8;
    let g = (70.0 - t * 20.0).round() as u8;
    let b = (220.0 - t * 180.0).round() as u8;
    format!("rgb({r},{g},{b})")
}

/// Clip the line `p(t) = origin + t * dir` to the window square; returns
/// the parameter interval, if any (Liang-Barsky).
fn clip_line_to_box(origin: Point, dir: Point, min: Point, max: Point) -> Option<(f64, f64)> {
    let mut t0 = f64::NEG_INFINITY;
    let mut t1 = f64::INFINITY;
    for (o, d, lo, hi) in [
        (origin.x, dir.x, min.x, max.x),
        (origin.y, dir.y, min.y, max.y),
    ] {
        if d.abs() < 1e-15 {
            if o < lo || o > hi {
                return None;
            }
            continue;
        }
        let (a, b) = ((lo - o) / d, (hi - o) / d);
        let (a, b) = (a.min(b), a.max(b));
        t0 = t0.max(a);
        t1 = t1.min(b);
    }
    (t0 < t1).then_some((t0, t1))
}

pub fn render_svg(scene: &Scene, overlays: &Overlays) -> String {
    let r = scene.radius;
    let c = scene.center;
    let (vx, vy) = (c.x - r, -c.y - r);
    let side = 2.0 * r;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"800\" height=\"800\" viewBox=\"{} {} {} {}\">",
        fmt(vx),
        fmt(vy),
        fmt(side),
        fmt(side)
    );
    let _ = writeln!(
        out,
        "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"white\"/>",
        fmt(vx),
        fmt(vy),
        fmt(side),
        fmt(side)
    );

    if let Some(raster) = overlays.raster {
        draw_raster(&mut out, raster);
    }
    draw_roads(&mut out, scene);
    for (k, path) in overlays.paths.iter().enumerate() {
        draw_path(&mut out, scene, path, k);
    }
    for p in overlays.points {
        let (x, y) = map(*p);
        let _ = writeln!(
            out,
            "<circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"black\"/>",
            fmt(x),
            fmt(y),
            fmt(r / 120.0)
        );
    }
    out.push_str("</svg>\n");
    out
}

fn draw_roads(out: &mut String, scene: &Scene) {
    if scene.is_empty() {
        return;
    }
    let r = scene.radius;
    let min = Point::new(scene.center.x - r, scene.center.y - r);
    let max = Point::new(scene.center.x + r, scene.center.y + r);
    let lv_min = scene.roads().last().map(|rd| rd.v.ln()).unwrap_or(0.0);
    let lv_max = scene.v_max().ln();
    let span = (lv_max - lv_min).max(1e-12);
    // slowest first so fast roads draw on top
    for road in scene.roads().iter().rev() {
        let Some((t0, t1)) = clip_line_to_box(road.line.point_at(0.0), road.line.dir(), min, max)
        else {
            continue;
        };
        let a = map(road.line.point_at(t0));
        let b = map(road.line.point_at(t1));
        let t = (road.v.ln() - lv_min) / span;
        let width = r * (0.002 + 0.006 * t);
        let _ = writeln!(
            out,
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{}\" stroke-width=\"{}\"/>",
            fmt(a.0),
            fmt(a.1),
            fmt(b.0),
            fmt(b.1),
            ramp(t),
            fmt(width)
        );
    }
}

fn draw_path(out: &mut String, scene: &Scene, path: &GeodesicPath, index: usize) {
    let verts = path.vertices();
    if verts.len() < 2 {
        return;
    }
    let colors = ["black", "#444444", "#006600", "#660066"];
    let color = colors[index % colors.len()];
    let mut points = String::new();
    for v in verts {
        let (x, y) = map(v);
        let _ = write!(points, "{},{} ", fmt(x), fmt(y));
    }
    let _ = writeln!(
        out,
        "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"{}\"/>",
        points.trim_end(),
        fmt(scene.radius * 0.009)
    );
}

fn draw_raster(out: &mut String, raster: &BallRaster) {
    let levels: Vec<f64> = if raster.radii.is_empty() {
        let max = raster.max_finite_time();
        (1..=8).map(|k| max * k as f64 / 8.0).collect()
    } else {
        let mut v = raster.radii.clone();
        v.sort_by(f64::total_cmp);
        v
    };
    let band = |t: f64| levels.iter().position(|&l| t <= l);
    let n = raster.resolution;
    let k_max = (levels.len() - 1).max(1) as f64;
    for j in 0..n {
        let mut i = 0;
        while i < n {
            let b = band(raster.time_at(i, j));
            let start = i;
            while i < n && band(raster.time_at(i, j)) == b {
                i += 1;
            }
            let Some(b) = b else { continue };
            // one rect per run of equal band cells
            let x = raster.corner.x + start as f64 * raster.spacing;
            let y_top = raster.corner.y + (j + 1) as f64 * raster.spacing;
            let _ = writeln!(
                out,
                "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\"/>",
                fmt(x),
                fmt(-y_top),
                fmt((i - start) as f64 * raster.spacing),
                fmt(raster.spacing),
                ramp(b as f64 / k_max)
            );
        }
    }
}

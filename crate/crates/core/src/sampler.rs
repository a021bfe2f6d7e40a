//! Sampling of the planar Poisson road process in a window with a speed
//! cutoff, scaling maps, and speed-limit queries.
//!
//! A scene holds every road of the process with speed at least `v_min`
//! whose line meets the closed ball B(center, radius). Roads are infinite
//! lines; the window only determines which roads were sampled. With the
//! cutoff matched to the query relaxation (`eps >= v_min`), truncation is an
//! exactness condition rather than an approximation.

use crate::error::{Error, Result};
use crate::geometry::{intersect, Line, Point};
use crate::rng::SplitMix64;
use serde::Serialize;
use std::f64::consts::PI;
use std::fmt::Write as _;

/// Substream index reserved for the road count; road `i` uses substream `i`.
const COUNT_STREAM: u64 = u64::MAX;

/// One road: an infinite line with a speed limit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Road {
    pub id: u64,
    pub line: Line,
    pub v: f64,
}

/// Dilation by `ratio` at `anchor`; speeds pick up the factor
/// `ratio^(1/(beta-1))` that leaves the process invariant in law.
#[derive(Clone, Copy, Debug)]
pub struct ScalingMap {
    pub anchor: Point,
    pub ratio: f64,
}

impl ScalingMap {
    pub fn new(anchor: Point, ratio: f64) -> Result<Self> {
        if !(ratio > 0.0 && ratio.is_finite()) {
            return Err(Error::invalid(
                "ratio",
                format!("must be positive, got {ratio}"),
            ));
        }
        Ok(Self { anchor, ratio })
    }

    pub fn apply_point(&self, p: Point) -> Point {
        self.anchor + p.scale(self.ratio)
    }

    /// Speed multiplier for the given model exponent.
    pub fn speed_factor(&self, beta: f64) -> f64 {
        self.ratio.powf(1.0 / (beta - 1.0))
    }
}

/// A sampled window of the road process; immutable after construction.
#[derive(Clone, Debug, PartialEq)]
pub struct Scene {
    roads: Vec<Road>,
    pub center: Point,
    pub radius: f64,
    pub v_min: f64,
    pub beta: f64,
    pub seed: u64,
}

/// Inverse of the speed tail `P(v >= t) = (t / v_min)^-(beta-1)`.
pub fn speed_from_uniform(u: f64, v_min: f64, beta: f64) -> f64 {
    v_min * u.powf(-1.0 / (beta - 1.0))
}

/// Sample the process restricted to lines hitting B(center, radius) with
/// speed at least `v_min`. The road count is Poisson with mean
/// `radius * v_min^-(beta-1)`; each road draws an independent uniform angle,
/// a uniform offset in [-radius, radius] from the center, and a Pareto speed.
pub fn sample_scene(center: Point, radius: f64, v_min: f64, beta: f64, seed: u64) -> Result<Scene> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::invalid(
            "radius",
            format!("must be positive, got {radius}"),
        ));
    }
    if !(v_min > 0.0 && v_min.is_finite()) {
        return Err(Error::invalid(
            "v_min",
            format!("must be positive, got {v_min}"),
        ));
    }
    if beta.is_nan() || beta <= 2.0 {
        return Err(Error::invalid(
            "beta",
            format!("must exceed 2 so the windowed intensity is finite, got {beta}"),
        ));
    }
    let lambda = radius * v_min.powf(-(beta - 1.0));
    let count = SplitMix64::substream(seed, COUNT_STREAM).poisson(lambda);
    let mut roads = Vec::with_capacity(count as usize);
    for id in 0..count {
        let mut rng = SplitMix64::substream(seed, id);
        let theta = rng.uniform(0.0, PI);
        let offset = rng.uniform(-radius, radius);
        let v = speed_from_uniform(rng.next_f64_open(), v_min, beta);
        let normal = Point::new(-theta.sin(), theta.cos());
        let line = Line::new(theta, center.dot(normal) + offset);
        roads.push(Road { id, line, v });
    }
    sort_roads(&mut roads);
    Ok(Scene {
        roads,
        center,
        radius,
        v_min,
        beta,
        seed,
    })
}

fn sort_roads(roads: &mut [Road]) {
    roads.sort_by(|a, b| b.v.total_cmp(&a.v).then(a.id.cmp(&b.id)));
}

/// Image of a scene under a scaling map: lines are dilated, speeds, the
/// window and the cutoff all pick up their exact factors.
pub fn scale_scene(s: &Scene, m: &ScalingMap) -> Scene {
    let vf = m.speed_factor(s.beta);
    let roads = s
        .roads
        .iter()
        .map(|r| Road {
            id: r.id,
            line: r.line.scaled(m.anchor, m.ratio),
            v: r.v * vf,
        })
        .collect();
    Scene {
        roads,
        center: m.apply_point(s.center),
        radius: s.radius * m.ratio,
        v_min: s.v_min * vf,
        beta: s.beta,
        seed: s.seed,
    }
}

impl Scene {
    /// Build a scene directly from roads (test scaffolding and file parsing).
    pub fn from_roads(
        mut roads: Vec<Road>,
        center: Point,
        radius: f64,
        v_min: f64,
        beta: f64,
        seed: u64,
    ) -> Scene {
        sort_roads(&mut roads);
        Scene {
            roads,
            center,
            radius,
            v_min,
            beta,
            seed,
        }
    }

    /// Roads sorted by speed descending, ties broken by id.
    pub fn roads(&self) -> &[Road] {
        &self.roads
    }

    pub fn len(&self) -> usize {
        self.roads.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roads.is_empty()
    }

    /// Expected road count of the window.
    pub fn mean_count(&self) -> f64 {
        self.radius * self.v_min.powf(-(self.beta - 1.0))
    }

    /// Fastest sampled speed; 0 for an empty scene.
    pub fn v_max(&self) -> f64 {
        self.roads.first().map_or(0.0, |r| r.v)
    }

    /// Speed limit at `p`: the maximal speed among roads passing within
    /// `tol` of `p`, and 0 when there is none.
    pub fn speed_at(&self, p: Point, tol: f64) -> f64 {
        debug_assert!(tol >= 0.0);
        self.roads
            .iter()
            .find(|r| r.line.dist_to_point(p) <= tol)
            .map_or(0.0, |r| r.v)
    }

    /// All pairwise road intersections, ordered by id pair.
    pub fn intersections(&self) -> Vec<(Point, u64, u64)> {
        let mut by_id: Vec<&Road> = self.roads.iter().collect();
        by_id.sort_by_key(|r| r.id);
        let mut out = Vec::new();
        for (k, a) in by_id.iter().enumerate() {
            for b in &by_id[k + 1..] {
                if let Some(p) = intersect(a.line, b.line) {
                    out.push((p, a.id, b.id));
                }
            }
        }
        out
    }

    /// Text serialization: a header line followed by one `id theta w v`
    /// record per road, floats printed with 17 significant digits so the
    /// round trip is bit-exact.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "roadmetric-scene v1 beta={} R={} cx={} cy={} vmin={} seed={}",
            fmt17(self.beta),
            fmt17(self.radius),
            fmt17(self.center.x),
            fmt17(self.center.y),
            fmt17(self.v_min),
            self.seed
        );
        for r in &self.roads {
            let _ = writeln!(
                s,
                "{} {} {} {}",
                r.id,
                fmt17(r.line.theta()),
                fmt17(r.line.w()),
                fmt17(r.v)
            );
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Scene> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or_else(|| Error::SceneParse {
            line: 1,
            reason: "empty input".into(),
        })?;
        let mut beta = None;
        let mut radius = None;
        let mut cx = None;
        let mut cy = None;
        let mut v_min = None;
        let mut seed = None;
        let mut fields = header.split_whitespace();
        if fields.next() != Some("roadmetric-scene") || fields.next() != Some("v1") {
            return Err(Error::SceneParse {
                line: 1,
                reason: "expected `roadmetric-scene v1` header".into(),
            });
        }
        for field in fields {
            let (key, value) = field.split_once('=').ok_or_else(|| Error::SceneParse {
                line: 1,
                reason: format!("malformed header field `{field}`"),
            })?;
            let parse_err = |e| Error::SceneParse {
                line: 1,
                reason: format!("bad value for `{key}`: {e}"),
            };
            match key {
                "beta" => beta = Some(value.parse().map_err(|e| parse_err(format!("{e}")))?),
                "R" => radius = Some(value.parse().map_err(|e| parse_err(format!("{e}")))?),
                "cx" => cx = Some(value.parse().map_err(|e| parse_err(format!("{e}")))?),
                "cy" => cy = Some(value.parse().map_err(|e| parse_err(format!("{e}")))?),
                "vmin" => v_min = Some(value.parse().map_err(|e| parse_err(format!("{e}")))?),
                "seed" => seed = Some(value.parse().map_err(|e| parse_err(format!("{e}")))?),
                other => {
                    return Err(Error::SceneParse {
                        line: 1,
                        reason: format!("unknown header field `{other}`"),
                    })
                }
            }
        }
        let missing = |name: &str| Error::SceneParse {
            line: 1,
            reason: format!("missing header field `{name}`"),
        };
        let mut roads = Vec::new();
        for (idx, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let mut next = |name: &str| {
                parts.next().ok_or_else(|| Error::SceneParse {
                    line: idx + 1,
                    reason: format!("missing field `{name}`"),
                })
            };
            let id: u64 = next("id")?.parse().map_err(|e| Error::SceneParse {
                line: idx + 1,
                reason: format!("bad id: {e}"),
            })?;
            let num = |name: &'static str, raw: &str| -> Result<f64> {
                raw.parse().map_err(|e| Error::SceneParse {
                    line: idx + 1,
                    reason: format!("bad {name}: {e}"),
                })
            };
            let theta = next("theta").and_then(|raw| num("theta", raw))?;
            let w = next("w").and_then(|raw| num("w", raw))?;
            let v = next("v").and_then(|raw| num("v", raw))?;
            roads.push(Road {
                id,
                line: Line::new(theta, w),
                v,
            });
        }
        sort_roads(&mut roads);
        Ok(Scene {
            roads,
            center: Point::new(
                cx.ok_or_else(|| missing("cx"))?,
                cy.ok_or_else(|| missing("cy"))?,
            ),
            radius: radius.ok_or_else(|| missing("R"))?,
            v_min: v_min.ok_or_else(|| missing("vmin"))?,
            beta: beta.ok_or_else(|| missing("beta"))?,
            seed: seed.ok_or_else(|| missing("seed"))?,
        })
    }
}

/// 17 significant digits: enough to reproduce any f64 bit pattern exactly.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

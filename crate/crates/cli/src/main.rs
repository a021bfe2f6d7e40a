//! Command-line driver: sampling scenes, geodesic queries, eps sweeps,
//! ball rasters, structure scans, statistical checks, and SVG rendering.
//!
//! Exit codes: 0 on success, 1 on validation/usage errors, 2 when a
//! statistical check fails.

mod svg;

use clap::{Args, Parser, Subcommand};
use roadmetric_core::analysis::stats::{
    ks_critical_one_sample_1pct, ks_critical_two_sample_1pct, ks_uniform,
};
use roadmetric_core::analysis::{
    ball_raster, confluence_tree, cut_locus_scan, emit_report, hub_check, poisson_law_check,
    scaling_exponent, star_arms, BallRaster, GridSpec, Report,
};
use roadmetric_core::eps_graph::{build_graph, build_graph_full};
use roadmetric_core::geometry::Point;
use roadmetric_core::sampler::{sample_scene, Scene};
use roadmetric_core::solver::{
    eps_sweep, shortest_path, t_eps_with_path, GeodesicPath, PathSegment, SegmentMode,
};
use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "roadmetric",
    version,
    about = "Poisson roads random metric toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

fn parse_point(s: &str) -> Result<Point, String> {
    let (x, y) = s
        .split_once(',')
        .ok_or_else(|| format!("expected `x,y`, got `{s}`"))?;
    let parse = |t: &str| {
        t.trim()
            .parse::<f64>()
            .map_err(|e| format!("bad coordinate `{t}`: {e}"))
    };
    Ok(Point::new(parse(x)?, parse(y)?))
}

fn parse_list(s: &str) -> Result<Vec<f64>, String> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|e| format!("bad number `{t}`: {e}"))
        })
        .collect()
}

#[derive(Args)]
struct SceneArg {
    /// Scene file produced by `sample`
    #[arg(long)]
    scene: PathBuf,
}

impl SceneArg {
    fn load(&self) -> Result<Scene, String> {
        let text = fs::read_to_string(&self.scene)
            .map_err(|e| format!("cannot read {}: {e}", self.scene.display()))?;
        Scene::from_text(&text).map_err(|e| e.to_string())
    }
}

#[derive(Subcommand)]
enum Command {
    /// Sample a scene of the road process and write it to a file
    Sample {
        #[arg(long, default_value_t = 3.0)]
        beta: f64,
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        #[arg(long, default_value_t = 0.1)]
        vmin: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true, default_value = "0,0")]
        center: Point,
        #[arg(long, default_value = "scene.txt")]
        out: PathBuf,
    },
    /// Shortest relaxed geodesic between two points
    Geodesic {
        #[command(flatten)]
        scene: SceneArg,
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        from: Point,
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        to: Point,
        #[arg(long)]
        eps: f64,
        /// Use the validation-mode graph with interior hop candidates
        #[arg(long)]
        full: bool,
        /// Write the node/edge dump of the query graph here
        #[arg(long)]
        dump_graph: Option<PathBuf>,
        /// Write the path record here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Bracket the metric over a decreasing eps list
    Sweep {
        #[command(flatten)]
        scene: SceneArg,
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        from: Point,
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        to: Point,
        /// Strictly decreasing, comma-separated
        #[arg(long, value_parser = parse_list)]
        eps_list: std::vec::Vec<f64>,
    },
    /// Travel-time field around a center point
    Ball {
        #[command(flatten)]
        scene: SceneArg,
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true, default_value = "0,0")]
        center: Point,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 96)]
        resolution: u32,
        /// Iso levels in seconds (defaults to eight even levels)
        #[arg(long, value_parser = parse_list, default_value = "")]
        radii: std::vec::Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also render the field to this SVG file
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Verify the hub property at sampled intersections
    Hubs {
        #[command(flatten)]
        scene: SceneArg,
        #[arg(long, default_value_t = 0.02)]
        delta: f64,
        /// Check at most this many intersections
        #[arg(long, default_value_t = 100)]
        limit: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Coalescence forest of geodesics into a target
    Confluence {
        #[command(flatten)]
        scene: SceneArg,
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        target: Point,
        /// Repeatable source point
        #[arg(long = "source", value_parser = parse_point, allow_hyphen_values = true, required = true)]
        sources: Vec<Point>,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Scan a grid for points with several near-optimal geodesics
    Cutlocus {
        #[command(flatten)]
        scene: SceneArg,
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        origin: Point,
        #[arg(long)]
        eps: f64,
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true, default_value = "0,0")]
        grid_center: Point,
        #[arg(long, default_value_t = 1.0)]
        half_width: f64,
        #[arg(long, default_value_t = 1.0)]
        half_height: f64,
        #[arg(long, default_value_t = 0.1)]
        spacing: f64,
        /// Absolute time slack; default is 1e-6 of each query's distance
        #[arg(long)]
        slack: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Count geodesic arms emanating from a point
    Stars {
        #[command(flatten)]
        scene: SceneArg,
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        point: Point,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        delta: f64,
    },
    /// Estimate the travel-time scaling exponent across window sizes
    Scaling {
        #[arg(long, default_value_t = 3.0)]
        beta: f64,
        #[arg(long, value_parser = parse_list, default_value = "1,4,16")]
        radii: std::vec::Vec<f64>,
        #[arg(long, default_value_t = 300)]
        trials: u32,
        #[arg(long, default_value_t = 0.2)]
        eps0: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Export the per-radius time samples as CSV
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Statistical verification suites (exit 2 on failure)
    Check {
        #[command(subcommand)]
        suite: CheckSuite,
    },
    /// Render a scene with optional overlays to SVG
    Render {
        #[command(flatten)]
        scene: SceneArg,
        /// Ball raster JSON produced by `ball`
        #[arg(long)]
        ball: Option<PathBuf>,
        /// Repeatable path record file produced by `geodesic`
        #[arg(long = "path")]
        paths: Vec<PathBuf>,
        /// Repeatable marker point
        #[arg(long = "point", value_parser = parse_point, allow_hyphen_values = true)]
        points: Vec<Point>,
        #[arg(long, default_value = "scene.svg")]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum CheckSuite {
    /// Windowed road counts against the model intensity
    Poisson {
        #[arg(long, default_value_t = 10_000)]
        trials: u32,
        #[arg(long, default_value_t = 100)]
        seed: u64,
    },
    /// Angle and offset marginals of sampled roads
    Marginals {
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Scaling exponent and distributional self-similarity
    Scaling {
        #[arg(long, default_value_t = 300)]
        trials: u32,
        #[arg(long, default_value_t = 90_210)]
        seed: u64,
    },
    /// All of the above
    All {
        #[arg(long, default_value_t = 10_000)]
        trials: u32,
        #[arg(long, default_value_t = 100)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap renders its own message (including --help output)
            let is_help = matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            );
            let _ = e.print();
            return if is_help {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            };
        }
    };
    match run(cli.command) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn write_or_print(out: Option<&PathBuf>, content: &str) -> Result<(), String> {
    match out {
        Some(path) => {
            fs::write(path, content).map_err(|e| format!("cannot write {}: {e}", path.display()))
        }
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn run(command: Command) -> Result<ExitCode, String> {
    match command {
        Command::Sample {
            beta,
            radius,
            vmin,
            seed,
            center,
            out,
        } => {
            println!(
                "config: sample beta={beta} radius={radius} vmin={vmin} seed={seed} center={},{} out={}",
                center.x,
                center.y,
                out.display()
            );
            let scene =
                sample_scene(center, radius, vmin, beta, seed).map_err(|e| e.to_string())?;
            fs::write(&out, scene.to_text())
                .map_err(|e| format!("cannot write {}: {e}", out.display()))?;
            println!("wrote {} roads to {}", scene.len(), out.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Geodesic {
            scene,
            from,
            to,
            eps,
            full,
            dump_graph,
            out,
        } => {
            println!(
                "config: geodesic scene={} from={},{} to={},{} eps={eps} full={full}",
                scene.scene.display(),
                from.x,
                from.y,
                to.x,
                to.y
            );
            let s = scene.load()?;
            if eps <= 0.0 {
                return Err("eps must be positive".into());
            }
            let (bracket, path) = if full {
                let g = build_graph_full(&s, from, to, eps);
                if let Some(p) = &dump_graph {
                    fs::write(p, g.dump_text()).map_err(|e| e.to_string())?;
                }
                let path = shortest_path(&g);
                let cert = roadmetric_core::eps_graph::containment_certificate(
                    &s,
                    from,
                    to,
                    path.total_time,
                    eps,
                );
                (
                    roadmetric_core::solver::BracketResult {
                        eps,
                        t_eps: path.total_time,
                        kendall_ub: f64::INFINITY,
                        certificate: cert,
                    },
                    path,
                )
            } else {
                if let Some(p) = &dump_graph {
                    fs::write(p, build_graph(&s, from, to, eps).dump_text())
                        .map_err(|e| e.to_string())?;
                }
                t_eps_with_path(&s, from, to, eps)
            };
            write_or_print(out.as_ref(), &path.record(&bracket.certificate, eps))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Sweep {
            scene,
            from,
            to,
            eps_list,
        } => {
            println!(
                "config: sweep scene={} from={},{} to={},{} eps_list={eps_list:?}",
                scene.scene.display(),
                from.x,
                from.y,
                to.x,
                to.y
            );
            let s = scene.load()?;
            let results = eps_sweep(&s, from, to, &eps_list).map_err(|e| e.to_string())?;
            println!("eps t_eps kendall_ub margin containment_ok");
            for b in results {
                println!(
                    "{} {} {} {} {}",
                    b.eps,
                    b.t_eps,
                    b.kendall_ub,
                    b.certificate.double_refraction_margin,
                    b.certificate.containment_ok
                );
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Ball {
            scene,
            center,
            eps,
            resolution,
            radii,
            out,
            svg: svg_path,
        } => {
            println!(
                "config: ball scene={} center={},{} eps={eps} resolution={resolution} radii={radii:?}",
                scene.scene.display(),
                center.x,
                center.y
            );
            let s = scene.load()?;
            let raster =
                ball_raster(&s, center, eps, &radii, resolution).map_err(|e| e.to_string())?;
            let mut buf = Vec::new();
            emit_report(&mut buf, &Report::BallRaster(&raster)).map_err(|e| e.to_string())?;
            write_or_print(
                out.as_ref(),
                &String::from_utf8(buf).expect("json is utf-8"),
            )?;
            if let Some(path) = svg_path {
                let overlays = svg::Overlays {
                    raster: Some(&raster),
                    points: &[center],
                    ..Default::default()
                };
                fs::write(&path, svg::render_svg(&s, &overlays)).map_err(|e| e.to_string())?;
                println!("wrote {}", path.display());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Hubs {
            scene,
            delta,
            limit,
            out,
        } => {
            println!(
                "config: hubs scene={} delta={delta} limit={limit}",
                scene.scene.display()
            );
            let s = scene.load()?;
            let mut buf = Vec::new();
            let mut checked = 0;
            let mut applicable = 0;
            let mut geodesic = 0;
            for (_, i, j) in s.intersections() {
                if checked == limit {
                    break;
                }
                let report = hub_check(&s, i, j, delta).map_err(|e| e.to_string())?;
                checked += 1;
                applicable += report.applicable as usize;
                geodesic += report.all_geodesic as usize;
                emit_report(&mut buf, &Report::HubReport(&report)).map_err(|e| e.to_string())?;
            }
            write_or_print(
                out.as_ref(),
                &String::from_utf8(buf).expect("json is utf-8"),
            )?;
            println!("checked {checked} intersections: {applicable} applicable, {geodesic} fully geodesic");
            Ok(ExitCode::SUCCESS)
        }
        Command::Confluence {
            scene,
            target,
            sources,
            eps,
            out,
        } => {
            println!(
                "config: confluence scene={} target={},{} sources={} eps={eps}",
                scene.scene.display(),
                target.x,
                target.y,
                sources.len()
            );
            let s = scene.load()?;
            let tree = confluence_tree(&s, target, &sources, eps).map_err(|e| e.to_string())?;
            let mut buf = Vec::new();
            emit_report(&mut buf, &Report::ConfluenceTree(&tree)).map_err(|e| e.to_string())?;
            write_or_print(
                out.as_ref(),
                &String::from_utf8(buf).expect("json is utf-8"),
            )?;
            println!(
                "{} sources, {} coalescence nodes, forest audit {}",
                tree.leaves.len(),
                tree.coalescence_nodes.len(),
                if tree.audit() { "ok" } else { "FAILED" }
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Cutlocus {
            scene,
            origin,
            eps,
            grid_center,
            half_width,
            half_height,
            spacing,
            slack,
            out,
        } => {
            println!(
                "config: cutlocus scene={} origin={},{} eps={eps} grid_center={},{} half_width={half_width} half_height={half_height} spacing={spacing} slack={slack:?}",
                scene.scene.display(),
                origin.x,
                origin.y,
                grid_center.x,
                grid_center.y
            );
            let s = scene.load()?;
            if spacing <= 0.0 {
                return Err("spacing must be positive".into());
            }
            let grid = GridSpec {
                center: grid_center,
                half_width,
                half_height,
                spacing,
            };
            let sample = cut_locus_scan(&s, origin, grid, eps, slack);
            let mut buf = Vec::new();
            emit_report(&mut buf, &Report::CutLocusSample(&sample)).map_err(|e| e.to_string())?;
            write_or_print(
                out.as_ref(),
                &String::from_utf8(buf).expect("json is utf-8"),
            )?;
            println!(
                "{} grid points scanned, {} hits",
                sample.scanned,
                sample.hits.len()
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Stars {
            scene,
            point,
            eps,
            delta,
        } => {
            println!(
                "config: stars scene={} point={},{} eps={eps} delta={delta}",
                scene.scene.display(),
                point.x,
                point.y
            );
            let s = scene.load()?;
            if delta <= 0.0 {
                return Err("delta must be positive".into());
            }
            let arms = star_arms(&s, point, eps, delta);
            println!("arms {arms}");
            Ok(ExitCode::SUCCESS)
        }
        Command::Scaling {
            beta,
            radii,
            trials,
            eps0,
            seed,
            out,
            csv,
        } => {
            println!("config: scaling beta={beta} radii={radii:?} trials={trials} eps0={eps0} seed={seed}");
            let report =
                scaling_exponent(beta, &radii, trials, eps0, seed).map_err(|e| e.to_string())?;
            let mut buf = Vec::new();
            emit_report(&mut buf, &Report::ScalingReport(&report)).map_err(|e| e.to_string())?;
            write_or_print(
                out.as_ref(),
                &String::from_utf8(buf).expect("json is utf-8"),
            )?;
            if let Some(path) = csv {
                let mut table = String::from("radius,trial,time\n");
                for (r, samples) in report.radii.iter().zip(&report.samples) {
                    for (k, t) in samples.iter().enumerate() {
                        let _ = writeln!(table, "{r},{k},{t}");
                    }
                }
                fs::write(&path, table).map_err(|e| e.to_string())?;
                println!("wrote {}", path.display());
            }
            println!(
                "slope {:.4} (expected {:.4}), ks {:.4}, implied dimension {:.2}",
                report.slope,
                report.expected_slope,
                report.ks_statistic,
                report.implied_hausdorff_dimension
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Check { suite } => run_check(suite),
        Command::Render {
            scene,
            ball,
            paths,
            points,
            out,
        } => {
            println!(
                "config: render scene={} ball={:?} paths={} points={} out={}",
                scene.scene.display(),
                ball.as_ref().map(|p| p.display().to_string()),
                paths.len(),
                points.len(),
                out.display()
            );
            let s = scene.load()?;
            let raster: Option<BallRaster> = match &ball {
                Some(path) => {
                    let text = fs::read_to_string(path).map_err(|e| e.to_string())?;
                    let line = text.lines().next().ok_or("empty raster file")?;
                    Some(serde_json::from_str(line).map_err(|e| format!("bad raster JSON: {e}"))?)
                }
                None => None,
            };
            let parsed_paths: Vec<GeodesicPath> = paths
                .iter()
                .map(|p| {
                    let text = fs::read_to_string(p).map_err(|e| e.to_string())?;
                    parse_path_record(&text)
                })
                .collect::<Result<_, String>>()?;
            let overlays = svg::Overlays {
                paths: &parsed_paths,
                raster: raster.as_ref(),
                points: &points,
            };
            fs::write(&out, svg::render_svg(&s, &overlays)).map_err(|e| e.to_string())?;
            println!("wrote {}", out.display());
            Ok(ExitCode::SUCCESS)
        }
    }
}

/// Parse a path record back into a renderable path (geometry only).
fn parse_path_record(text: &str) -> Result<GeodesicPath, String> {
    let mut segments = Vec::new();
    let mut total_time = 0.0;
    for (idx, line) in text.lines().enumerate() {
        if idx == 0 {
            if !line.starts_with("roadmetric-path v1") {
                return Err("expected `roadmetric-path v1` header".into());
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 7 {
            return Err(format!("malformed segment line {}", idx + 1));
        }
        let num = |i: usize| {
            fields[i]
                .parse::<f64>()
                .map_err(|e| format!("line {}: {e}", idx + 1))
        };
        let from = Point::new(num(2)?, num(3)?);
        let to = Point::new(num(4)?, num(5)?);
        let time = num(6)?;
        let speed = if time > 0.0 {
            from.dist(to) / time
        } else {
            1.0
        };
        let mode = match fields[0] {
            "road" => SegmentMode::Road {
                id: fields[1]
                    .parse()
                    .map_err(|e| format!("line {}: {e}", idx + 1))?,
                v: speed,
            },
            "straight" => SegmentMode::Straight { eps: speed },
            other => return Err(format!("unknown segment mode `{other}`")),
        };
        total_time += time;
        segments.push(PathSegment {
            from,
            to,
            mode,
            time,
        });
    }
    Ok(GeodesicPath {
        segments,
        total_time,
    })
}

fn run_check(suite: CheckSuite) -> Result<ExitCode, String> {
    let mut all_pass = true;
    match suite {
        CheckSuite::Poisson { trials, seed } => {
            println!("config: check poisson trials={trials} seed={seed}");
            all_pass &= check_poisson(trials, seed)?;
        }
        CheckSuite::Marginals { samples, seed } => {
            println!("config: check marginals samples={samples} seed={seed}");
            all_pass &= check_marginals(samples, seed)?;
        }
        CheckSuite::Scaling { trials, seed } => {
            println!("config: check scaling trials={trials} seed={seed}");
            all_pass &= check_scaling(trials, seed)?;
        }
        CheckSuite::All { trials, seed } => {
            println!("config: check all trials={trials} seed={seed}");
            all_pass &= check_poisson(trials, seed)?;
            all_pass &= check_marginals(10_000, seed)?;
            all_pass &= check_scaling(300, 90_210 + seed)?;
        }
    }
    Ok(if all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    })
}

fn check_poisson(trials: u32, seed: u64) -> Result<bool, String> {
    let mut pass = true;
    for (k, (radius, v0)) in [(1.0, 1.0), (2.0, 1.0), (1.0, 0.5)].into_iter().enumerate() {
        let report = poisson_law_check(radius, v0, 3.0, trials, seed + k as u64)
            .map_err(|e| e.to_string())?;
        println!(
            "poisson R={radius} v0={v0}: mean {:.4} variance {:.4} expected {:.4} -> {}",
            report.mean,
            report.variance,
            report.expected_mean,
            if report.pass { "pass" } else { "FAIL" }
        );
        pass &= report.pass;
    }
    Ok(pass)
}

fn check_marginals(samples: usize, seed: u64) -> Result<bool, String> {
    let mut angles = Vec::new();
    let mut offsets = Vec::new();
    let mut k = 0u64;
    while angles.len() < samples {
        let s = sample_scene(Point::ORIGIN, 1.0, 0.5, 3.0, seed + 31_000 + k)
            .map_err(|e| e.to_string())?;
        for r in s.roads() {
            angles.push(r.line.theta());
            offsets.push(r.line.signed_offset(Point::ORIGIN));
        }
        k += 1;
    }
    angles.truncate(samples);
    offsets.truncate(samples);
    let crit = ks_critical_one_sample_1pct(samples);
    let ka = ks_uniform(&mut angles, 0.0, std::f64::consts::PI);
    let ko = ks_uniform(&mut offsets, -1.0, 1.0);
    println!(
        "marginals: angle KS {ka:.5}, offset KS {ko:.5}, critical {crit:.5} -> {}",
        if ka < crit && ko < crit {
            "pass"
        } else {
            "FAIL"
        }
    );
    Ok(ka < crit && ko < crit)
}

fn check_scaling(trials: u32, seed: u64) -> Result<bool, String> {
    let report =
        scaling_exponent(3.0, &[1.0, 4.0, 16.0], trials, 0.2, seed).map_err(|e| e.to_string())?;
    let crit = ks_critical_two_sample_1pct(trials as usize, trials as usize);
    let pass = report.ks_statistic < crit && (0.45..=0.55).contains(&report.slope);
    println!(
        "scaling: slope {:.4} (expected 0.5), KS {:.4} (critical {crit:.4}) -> {}",
        report.slope,
        report.ks_statistic,
        if pass { "pass" } else { "FAIL" }
    );
    Ok(pass)
}

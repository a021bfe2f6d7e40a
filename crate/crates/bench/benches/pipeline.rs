//! Benchmarks for the hot pipeline stages: sampling, graph construction,
//! and shortest-path queries at a few scene densities.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use roadmetric_core::eps_graph::build_graph;
use roadmetric_core::geometry::Point;
use roadmetric_core::sampler::sample_scene;
use roadmetric_core::solver::{distance_to_target, kendall_upper_bound, shortest_path};
use std::hint::black_box;

fn scene_of(roads: f64, seed: u64) -> roadmetric_core::sampler::Scene {
    // mean road count R * v_min^-2 at beta = 3
    let v_min = (1.0 / roads).sqrt();
    sample_scene(Point::ORIGIN, 1.0, v_min, 3.0, seed).unwrap()
}

fn bench_sampling(c: &mut Criterion) {
    let mut group = c.benchmark_group("sample_scene");
    for roads in [25.0, 100.0, 400.0] {
        group.bench_with_input(
            BenchmarkId::from_parameter(roads as u64),
            &roads,
            |b, &roads| {
                let mut seed = 0;
                b.iter(|| {
                    seed += 1;
                    black_box(scene_of(roads, seed))
                });
            },
        );
    }
    group.finish();
}

fn bench_graph_build(c: &mut Criterion) {
    let mut group = c.benchmark_group("build_graph");
    for roads in [25.0, 100.0, 400.0] {
        let scene = scene_of(roads, 7);
        let eps = scene.v_min;
        group.bench_with_input(
            BenchmarkId::from_parameter(roads as u64),
            &scene,
            |b, scene| {
                b.iter(|| {
                    black_box(build_graph(
                        scene,
                        Point::new(-0.4, 0.1),
                        Point::new(0.4, -0.1),
                        eps,
                    ))
                });
            },
        );
    }
    group.finish();
}

fn bench_shortest_path(c: &mut Criterion) {
    let mut group = c.benchmark_group("shortest_path");
    for roads in [25.0, 100.0, 400.0] {
        let scene = scene_of(roads, 7);
        let eps = scene.v_min;
        let graph = build_graph(&scene, Point::new(-0.4, 0.1), Point::new(0.4, -0.1), eps);
        group.bench_with_input(
            BenchmarkId::from_parameter(roads as u64),
            &graph,
            |b, graph| {
                b.iter(|| black_box(distance_to_target(graph)));
            },
        );
        group.bench_with_input(
            BenchmarkId::new("with_path", roads as u64),
            &graph,
            |b, graph| {
                b.iter(|| black_box(shortest_path(graph).total_time));
            },
        );
    }
    group.finish();
}

fn bench_kendall(c: &mut Criterion) {
    let scene = scene_of(100.0, 7);
    let eps = scene.v_min;
    c.bench_function("kendall_upper_bound", |b| {
        b.iter(|| {
            black_box(kendall_upper_bound(
                &scene,
                Point::new(-0.4, 0.1),
                Point::new(0.4, -0.1),
                eps,
                0.3,
                16,
            ))
        });
    });
}

criterion_group!(
    benches,
    bench_sampling,
    bench_graph_build,
    bench_shortest_path,
    bench_kendall
);
criterion_main!(benches);

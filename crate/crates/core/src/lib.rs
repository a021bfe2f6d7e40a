//! Simulator and analysis toolkit for a planar random metric built from a
//! Poisson process of roads (lines with speed limits).
//!
//! The crate samples the road process in a window, reduces relaxed geodesic
//! queries to exact finite shortest-path problems, brackets the unrelaxed
//! driving-time metric, and provides empirical checks of the structural
//! properties of its geodesics (no pausing en route, hubs at intersections,
//! confluence, star-arm bounds, cut-locus scans, scaling exponents).

pub mod analysis;
pub mod eps_graph;
pub mod error;
pub mod geometry;
pub mod rng;
pub mod sampler;
pub mod solver;

pub use eps_graph::{
    build_graph, build_graph_full, build_graph_multi, containment_certificate,
    double_refraction_margin, Edge, EdgeKind, ExactnessCertificate, Graph, Node, NodeKind,
    Terminal,
};
pub use error::{Error, Result};
pub use geometry::{
    arc_polyline, intersect, mu_ball, mu_two_balls_mc, no_shortcut_inf, project, refraction_points,
    vertical_speed, ArcPolyline, Line, Point, Segment,
};
pub use rng::SplitMix64;
pub use sampler::{sample_scene, scale_scene, Road, ScalingMap, Scene};
pub use solver::{
    distance_between, eps_sweep, geodesic_between, k_near_geodesics, kendall_upper_bound,
    shortest_path, t_eps, t_eps_with_path, BracketResult, GeodesicPath, PathSegment, SegmentMode,
};

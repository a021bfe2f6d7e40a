//! Empirical verification suites and exploratory scanners for the structure
//! of geodesics: no-pause profiles, hub checks, confluence trees, cut-locus
//! scans, star-arm counts, scaling exponents, and ball rasters.

mod confluence;
mod cutlocus;
mod hubs;
mod pause;
mod raster;
mod scaling;
mod stars;
pub mod stats;

pub use confluence::{confluence_tree, ConfluenceTree};
pub use cutlocus::{cut_locus_scan, CutLocusSample, GridSpec};
pub use hubs::{hub_check, hub_check_with_eps, through_time_assembled, HubReport};
pub use pause::{no_pause_profile, structure_check, PauseProfile};
pub use raster::{ball_raster, BallRaster};
pub use scaling::{poisson_law_check, scaling_exponent, PoissonLawReport, ScalingReport};
pub use stars::star_arms;

use serde::Serialize;

/// Line-delimited JSON envelope: every report carries a `kind` field.
#[derive(Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Report<'a> {
    PauseProfile(&'a PauseProfile),
    HubReport(&'a HubReport),
    ConfluenceTree(&'a ConfluenceTree),
    CutLocusSample(&'a CutLocusSample),
    ScalingReport(&'a ScalingReport),
    PoissonLawReport(&'a PoissonLawReport),
    BallRaster(&'a BallRaster),
}

/// Append one JSON-lines record to the writer.
pub fn emit_report(mut w: impl std::io::Write, report: &Report) -> std::io::Result<()> {
    serde_json::to_writer(&mut w, report)?;
    writeln!(w)
}

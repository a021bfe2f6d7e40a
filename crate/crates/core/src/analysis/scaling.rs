//! Distributional self-similarity checks: the scaling exponent of travel
//! times across window sizes and the Poisson intensity law of road counts.

use crate::analysis::stats;
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::rng::SplitMix64;
use crate::sampler::sample_scene;
use rayon::prelude::*;
use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct ScalingReport {
    pub beta: f64,
    pub eps0: f64,
    pub trials: u32,
    pub seed: u64,
    pub radii: Vec<f64>,
    /// Travel-time samples per radius (one inner vector per radius).
    pub samples: Vec<Vec<f64>>,
    /// Log-log slope of the median travel time against the radius.
    pub slope: f64,
    /// Expected slope `(beta - 2) / (beta - 1)` in the plane.
    pub expected_slope: f64,
    /// Two-sample KS statistic of the normalized times at the extreme radii.
    pub ks_statistic: f64,
    /// Metric dimension `(beta - 1) d / (beta - d)` implied by the exponent.
    pub implied_hausdorff_dimension: f64,
}

/// Sample travel times `t_eps(0, r e1)` over fresh scenes per radius, with
/// the cutoff matched to the scaling map (`eps_r = eps0 * r^(1/(beta-1))`),
/// and estimate the growth exponent. Scenes are independent across trials;
/// normalized samples at different radii share one law.
pub fn scaling_exponent(
    beta: f64,
    radii: &[f64],
    trials: u32,
    eps0: f64,
    seed: u64,
) -> Result<ScalingReport> {
    if radii.len() < 2 {
        return Err(Error::invalid("radii", "need at least two radii"));
    }
    if trials < 100 {
        return Err(Error::invalid(
            "trials",
            "need at least 100 trials per radius",
        ));
    }
    if eps0.is_nan() || eps0 <= 0.0 {
        return Err(Error::invalid("eps0", "must be positive"));
    }
    let exponent = 1.0 / (beta - 1.0);
    let samples: Vec<Vec<f64>> = radii
        .iter()
        .enumerate()
        .map(|(ri, &r)| {
            (0..trials)
                .into_par_iter()
                .map(|trial| {
                    let key = (ri as u64) << 32 | trial as u64;
                    let scene_seed = SplitMix64::substream(seed, key).next_u64();
                    let eps_r = eps0 * r.powf(exponent);
                    // window centered on the query segment, scaled with r
                    let scene =
                        sample_scene(Point::new(r / 2.0, 0.0), 2.0 * r, eps_r, beta, scene_seed)
                            .expect("validated parameters");
                    let g = crate::eps_graph::build_graph(
                        &scene,
                        Point::ORIGIN,
                        Point::new(r, 0.0),
                        eps_r,
                    );
                    crate::solver::distance_to_target(&g)
                })
                .collect()
        })
        .collect();

    let expected_slope = (beta - 2.0) / (beta - 1.0);
    let log_r: Vec<f64> = radii.iter().map(|r| r.ln()).collect();
    let log_med: Vec<f64> = samples.iter().map(|s| stats::median(s).ln()).collect();
    let slope = stats::least_squares_slope(&log_r, &log_med);

    let normalize = |ts: &[f64], r: f64| -> Vec<f64> {
        ts.iter().map(|t| t * r.powf(-expected_slope)).collect()
    };
    let mut first = normalize(&samples[0], radii[0]);
    let mut last = normalize(&samples[samples.len() - 1], radii[radii.len() - 1]);
    let ks_statistic = stats::ks_two_sample(&mut first, &mut last);

    Ok(ScalingReport {
        beta,
        eps0,
        trials,
        seed,
        radii: radii.to_vec(),
        samples,
        slope,
        expected_slope,
        ks_statistic,
        implied_hausdorff_dimension: (beta - 1.0) * 2.0 / (beta - 2.0),
    })
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct PoissonLawReport {
    pub radius: f64,
    pub v0: f64,
    pub beta: f64,
    pub trials: u32,
    pub expected_mean: f64,
    pub mean: f64,
    pub variance: f64,
    pub pass: bool,
}

/// Empirical mean and variance of windowed road counts against the model
/// intensity `R * v0^-(beta-1)`; passes when both sit within four standard
/// errors.
pub fn poisson_law_check(
    radius: f64,
    v0: f64,
    beta: f64,
    trials: u32,
    seed: u64,
) -> Result<PoissonLawReport> {
    if trials < 1000 {
        return Err(Error::invalid("trials", "need at least 1000 trials"));
    }
    let counts: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let scene_seed = SplitMix64::substream(seed, t as u64).next_u64();
            sample_scene(Point::ORIGIN, radius, v0, beta, scene_seed)
                .expect("validated parameters")
                .len() as f64
        })
        .collect();
    let lambda = radius * v0.powf(-(beta - 1.0));
    let (mean, variance) = stats::mean_variance(&counts);
    let n = trials as f64;
    let se_mean = (lambda / n).sqrt();
    // Var(s^2) for Poisson: (lambda + 2 lambda^2) / n
    let se_var = ((lambda + 2.0 * lambda * lambda) / n).sqrt();
    let pass = (mean - lambda).abs() <= 4.0 * se_mean && (variance - lambda).abs() <= 4.0 * se_var;
    Ok(PoissonLawReport {
        radius,
        v0,
        beta,
        trials,
        expected_mean: lambda,
        mean,
        variance,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn poisson_law_matches_unit_rate() {
        let r = poisson_law_check(1.0, 1.0, 3.0, 2000, 51).unwrap();
        assert!(r.pass, "mean {} var {}", r.mean, r.variance);
        assert!((r.expected_mean - 1.0).abs() < 1e-15);
    }

    #[test]
    fn poisson_law_rate_scales_with_window_and_cutoff() {
        let r2 = poisson_law_check(2.0, 1.0, 3.0, 2000, 52).unwrap();
        assert!((r2.expected_mean - 2.0).abs() < 1e-15 && r2.pass);
        let r4 = poisson_law_check(1.0, 0.5, 3.0, 2000, 53).unwrap();
        assert!((r4.expected_mean - 4.0).abs() < 1e-15 && r4.pass);
    }

    #[test]
    fn implied_dimension_for_beta_three() {
        let report = scaling_exponent(3.0, &[1.0, 4.0], 100, 0.35, 99).unwrap();
        assert!((report.implied_hausdorff_dimension - 4.0).abs() < 1e-12);
        assert!((report.expected_slope - 0.5).abs() < 1e-12);
        assert_eq!(report.samples.len(), 2);
        assert_eq!(report.samples[0].len(), 100);
    }

    #[test]
    fn scaling_validates_input() {
        assert!(scaling_exponent(3.0, &[1.0], 100, 0.3, 0).is_err());
        assert!(scaling_exponent(3.0, &[1.0, 2.0], 10, 0.3, 0).is_err());
        assert!(poisson_law_check(1.0, 1.0, 3.0, 10, 0).is_err());
    }
}

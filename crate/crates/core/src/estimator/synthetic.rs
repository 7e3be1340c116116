//! Seeded synthetic data following the linear force law, for tests and
//! calibration studies.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::CalibrationRecord;
use crate::error::{ensure, Result};
use crate::measurement::{IndentationSample, IndentationSeries};

fn noise_source(relative_sd: f64) -> Result<Normal<f64>> {
    ensure(
        relative_sd.is_finite() && (0.0..0.5).contains(&relative_sd),
        || format!("relative noise must lie in [0, 0.5), got {relative_sd}"),
    )?;
    Ok(Normal::new(0.0, relative_sd).expect("valid standard deviation"))
}

/// Positive multiplicative factor `1 + e` with `e ~ N(0, sd)`, redrawn
/// until positive.
fn factor(dist: &Normal<f64>, rng: &mut ChaCha8Rng) -> f64 {
    loop {
        let f = 1.0 + dist.sample(rng);
        if f > 0.0 {
            return f;
        }
    }
}

/// Series with `F = pi ks R P_g w`, forces perturbed by relative Gaussian noise.
#[allow(clippy::too_many_arguments)]
pub fn synthetic_series(
    object_id: &str,
    radius: f64,
    thickness: f64,
    pressure: f64,
    ks: f64,
    depths: &[f64],
    relative_noise: f64,
    seed: u64,
) -> Result<IndentationSeries> {
    let dist = noise_source(relative_noise)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples = depths
        .iter()
        .map(|&w| {
            let f = PI * ks * radius * pressure * w * factor(&dist, &mut rng);
            IndentationSample::new(f, w)
        })
        .collect::<Result<Vec<_>>>()?;
    IndentationSeries::new(object_id, samples, radius, thickness)
}

/// Copy of `series` with every force scaled by an independent `1 + e`.
pub fn with_force_noise(
    series: &IndentationSeries,
    relative_noise: f64,
    seed: u64,
) -> Result<IndentationSeries> {
    let dist = noise_source(relative_noise)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples = series
        .samples()
        .iter()
        .map(|s| IndentationSample::new(s.force * factor(&dist, &mut rng), s.depth))
        .collect::<Result<Vec<_>>>()?;
    IndentationSeries::new(
        series.object_id(),
        samples,
        series.region_radius(),
        series.region_thickness(),
    )
}

/// `repeats` records per pressure with `P_hat = ks P_g (1 + e)`.
pub fn noisy_records(
    pressures: &[f64],
    ks: f64,
    relative_noise: f64,
    repeats: usize,
    seed: u64,
) -> Result<Vec<CalibrationRecord>> {
    let dist = noise_source(relative_noise)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(pressures.len() * repeats);
    for &p in pressures {
        for _ in 0..repeats {
            out.push(CalibrationRecord::new(p, ks * p * factor(&dist, &mut rng))?);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn force_noise_is_seeded_and_keeps_depths() {
        let depths = [0.005, 0.01, 0.015];
        let clean = synthetic_series("s", 0.1, 1e-3, 1000.0, 0.64, &depths, 0.0, 0).unwrap();
        let a = with_force_noise(&clean, 0.05, 7).unwrap();
        let b = with_force_noise(&clean, 0.05, 7).unwrap();
        let c = with_force_noise(&clean, 0.05, 8).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        for (n, s) in a.samples().iter().zip(clean.samples()) {
            assert_eq!(n.depth, s.depth);
            assert!((n.force / s.force - 1.0).abs() < 0.5);
        }
        assert_eq!(with_force_noise(&clean, 0.0, 3).unwrap(), clean);
    }
}

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Least-squares line `y = slope * x` with an ordinary fit `y = a x + b`
/// alongside for diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProportionalFit {
    pub slope: f64,
    /// Coefficient of determination of the through-origin model, relative to
    /// the mean of `y`. Can be negative for data far from proportional.
    pub r2: f64,
    pub intercept_fit: Option<AffineFit>,
    pub n: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AffineFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

fn centered_total(ys: &[f64]) -> f64 {
    let mean = ys.iter().sum::<f64>() / ys.len() as f64;
    ys.iter().map(|y| (y - mean).powi(2)).sum()
}

fn determination(ss_res: f64, ss_tot: f64) -> f64 {
    if ss_tot > 0.0 {
        1.0 - ss_res / ss_tot
    } else if ss_res == 0.0 {
        1.0
    } else {
        0.0
    }
}

/// Through-origin fit. Fails when every `x` is equal, since the data then
/// cannot separate a proportional law from an offset.
pub fn fit_through_origin(xs: &[f64], ys: &[f64]) -> Result<ProportionalFit> {
    assert_eq!(xs.len(), ys.len());
    if xs.is_empty() {
        return Err(Error::InsufficientData("no samples to fit".into()));
    }
    let (lo, hi) = xs
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| {
            (a.min(x), b.max(x))
        });
    if hi - lo <= 1e-12 * hi.abs().max(lo.abs()) {
        return Err(Error::RankDeficient(format!(
            "all {} abscissae are equal ({lo}); the slope is not identifiable",
            xs.len()
        )));
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| x * y).sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let slope = sxy / sxx;
    let ss_res: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - slope * x).powi(2))
        .sum();
    Ok(ProportionalFit {
        slope,
        r2: determination(ss_res, centered_total(ys)),
        intercept_fit: fit_affine(xs, ys),
        n: xs.len(),
    })
}

/// Ordinary least-squares line; `None` with fewer than two distinct `x`.
pub fn fit_affine(xs: &[f64], ys: &[f64]) -> Option<AffineFit> {
    let n = xs.len() as f64;
    if xs.len() < 2 {
        return None;
    }
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx <= 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - slope * x - intercept).powi(2))
        .sum();
    Some(AffineFit {
        slope,
        intercept,
        r2: determination(ss_res, centered_total(ys)),
    })
}

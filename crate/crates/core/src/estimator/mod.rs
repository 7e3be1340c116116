//! Gauge-pressure and elastic-modulus estimation from indentation series.
//!
//! Pressure follows from the linear law `F = pi k_s R P_g w`: a through-origin
//! fit of force against depth gives `k_s P_g`, and `k_s` is calibrated once
//! against objects of known pressure. The modulus then follows from the
//! observed number of radial wrinkles.

mod fit;
mod modulus;
mod synthetic;

use std::collections::BTreeMap;
use std::f64::consts::PI;

use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::measurement::IndentationSeries;
use crate::shell::ShellParams;

pub use fit::{fit_affine, fit_through_origin, AffineFit, ProportionalFit};
pub use modulus::{
    critical_depth_for, estimate_modulus_from_critical_depth, estimate_modulus_from_wrinkles,
    modulus_from_wrinkle_number, wrinkle_number_for, ModulusEstimate, Reliability, CRITICAL_DEPTH,
};
pub use synthetic::{noisy_records, synthetic_series, with_force_noise};

/// Below this r^2 the force/depth data are flagged as not proportional.
pub const R2_WARN: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct RegressionOptions {
    /// Average depths of samples sharing the same force before fitting.
    pub average_levels: bool,
}

/// Result of fitting `F = slope * w` on one series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PressureFit {
    /// `k_s P_g` in pascals.
    pub pressure_hat: f64,
    /// Newtons per meter.
    pub slope: f64,
    pub r2: f64,
    pub intercept_fit: Option<AffineFit>,
    pub n: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationRecord {
    #[serde(rename = "measured_Pg")]
    pub measured_pressure: f64,
    #[serde(rename = "estimated_Pg_hat")]
    pub estimated_pressure_hat: f64,
}

impl CalibrationRecord {
    pub fn new(measured_pressure: f64, estimated_pressure_hat: f64) -> Result<Self> {
        ensure(
            measured_pressure.is_finite() && measured_pressure > 0.0,
            || format!("measured pressure must be positive, got {measured_pressure}"),
        )?;
        ensure(
            estimated_pressure_hat.is_finite() && estimated_pressure_hat > 0.0,
            || format!("estimated pressure must be positive, got {estimated_pressure_hat}"),
        )?;
        Ok(Self {
            measured_pressure,
            estimated_pressure_hat,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub ks: f64,
    pub records: Vec<CalibrationRecord>,
    pub fit_r2: f64,
}

impl Calibration {
    /// A calibration with a known factor and no supporting records.
    pub fn from_factor(ks: f64) -> Result<Self> {
        ensure(ks.is_finite() && ks > 0.0, || {
            format!("ks must be positive, got {ks}")
        })?;
        Ok(Self {
            ks,
            records: Vec::new(),
            fit_r2: 1.0,
        })
    }

    pub fn validate(&self) -> Result<()> {
        ensure(self.ks.is_finite() && self.ks > 0.0, || {
            format!("calibration factor must be positive, got {}", self.ks)
        })?;
        for r in &self.records {
            CalibrationRecord::new(r.measured_pressure, r.estimated_pressure_hat)?;
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cal: Self = serde_json::from_str(text)?;
        cal.validate()?;
        Ok(cal)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateDiagnostics {
    pub slope: f64,
    pub r2: f64,
    #[serde(rename = "n")]
    pub wrinkles: u32,
    pub tau: f64,
    pub intercept_fit: Option<AffineFit>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub object_id: String,
    #[serde(rename = "Pg_pa")]
    pub pressure: f64,
    #[serde(rename = "E_pa")]
    pub modulus: f64,
    pub nu: f64,
    pub ks_used: f64,
    pub diagnostics: EstimateDiagnostics,
}

impl Estimate {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

fn fit_points(series: &IndentationSeries, options: &RegressionOptions) -> (Vec<f64>, Vec<f64>) {
    if !options.average_levels {
        return series.samples().iter().map(|s| (s.depth, s.force)).unzip();
    }
    let mut levels: BTreeMap<u64, (f64, usize)> = BTreeMap::new();
    for s in series.samples() {
        let e = levels.entry(s.force.to_bits()).or_insert((0.0, 0));
        e.0 += s.depth;
        e.1 += 1;
    }
    levels
        .into_iter()
        .map(|(bits, (sum, count))| (sum / count as f64, f64::from_bits(bits)))
        .unzip()
}

/// Through-origin fit of force against depth; `pressure_hat = slope / (pi R)`.
pub fn regress_pressure_hat(
    series: &IndentationSeries,
    options: &RegressionOptions,
) -> Result<PressureFit> {
    let (depths, forces) = fit_points(series, options);
    let fit = fit_through_origin(&depths, &forces)?;
    if fit.r2 < R2_WARN {
        warn!(
            "{}: force/depth fit r2 = {:.3} is below {R2_WARN}; the data are not proportional",
            series.object_id(),
            fit.r2
        );
    }
    Ok(PressureFit {
        pressure_hat: fit.slope / (PI * series.region_radius()),
        slope: fit.slope,
        r2: fit.r2,
        intercept_fit: fit.intercept_fit,
        n: fit.n,
    })
}

/// Through-origin fit of estimated against measured pressure.
pub fn calibrate_ks(records: &[CalibrationRecord]) -> Result<Calibration> {
    let mut distinct: Vec<f64> = records.iter().map(|r| r.measured_pressure).collect();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "calibration needs records at 2 or more distinct pressures, got {}",
            distinct.len()
        )));
    }
    for r in records {
        CalibrationRecord::new(r.measured_pressure, r.estimated_pressure_hat)?;
    }
    let xs: Vec<f64> = records.iter().map(|r| r.measured_pressure).collect();
    let ys: Vec<f64> = records.iter().map(|r| r.estimated_pressure_hat).collect();
    let fit = fit_through_origin(&xs, &ys)?;
    Ok(Calibration {
        ks: fit.slope,
        records: records.to_vec(),
        fit_r2: fit.r2,
    })
}

/// Builds a calibration from series taken at known pressures.
pub fn calibrate_from_series(
    runs: &[(f64, &IndentationSeries)],
    options: &RegressionOptions,
) -> Result<Calibration> {
    let records = runs
        .iter()
        .map(|(pressure, series)| {
            let fit = regress_pressure_hat(series, options)?;
            CalibrationRecord::new(*pressure, fit.pressure_hat)
        })
        .collect::<Result<Vec<_>>>()?;
    calibrate_ks(&records)
}

pub fn estimate_pressure(
    series: &IndentationSeries,
    calibration: &Calibration,
    options: &RegressionOptions,
) -> Result<f64> {
    calibration.validate()?;
    Ok(regress_pressure_hat(series, options)?.pressure_hat / calibration.ks)
}

/// Pressure from the series, then modulus from the wrinkle count.
pub fn estimate_properties(
    series: &IndentationSeries,
    calibration: &Calibration,
    wrinkles: u32,
    nu: Option<f64>,
    options: &RegressionOptions,
) -> Result<Estimate> {
    calibration.validate()?;
    let nu = nu.unwrap_or(crate::DEFAULT_NU);
    let fit = regress_pressure_hat(series, options)?;
    let pressure = fit.pressure_hat / calibration.ks;
    let (radius, thickness) = (series.region_radius(), series.region_thickness());
    let modulus = estimate_modulus_from_wrinkles(radius, thickness, wrinkles, pressure, nu)?;
    let tau = ShellParams::new(radius, thickness, modulus, nu, pressure)?.tau();
    Ok(Estimate {
        object_id: series.object_id().to_string(),
        pressure,
        modulus,
        nu,
        ks_used: calibration.ks,
        diagnostics: EstimateDiagnostics {
            slope: fit.slope,
            r2: fit.r2,
            wrinkles,
            tau,
            intercept_fit: fit.intercept_fit,
        },
    })
}

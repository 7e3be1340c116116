use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{ensure, Result};
use crate::shell::WRINKLE_PREFACTOR;

/// Dimensionless critical indentation depth at which wrinkles appear.
pub const CRITICAL_DEPTH: f64 = 2.52;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Reliability {
    Reliable,
    /// Sensitive to an ill-defined observation; use for cross-checks only.
    Unreliable,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModulusEstimate {
    pub modulus: f64,
    pub reliability: Reliability,
}

fn check_positive(values: &[(&str, f64)]) -> Result<()> {
    for &(name, v) in values {
        ensure(v.is_finite() && v > 0.0, || {
            format!("{name} must be positive, got {v}")
        })?;
    }
    Ok(())
}

/// Young's modulus from the number of radial wrinkles `n`, treated as a
/// real number so the relation can be inverted exactly.
pub fn modulus_from_wrinkle_number(
    radius: f64,
    thickness: f64,
    wrinkles: f64,
    pressure: f64,
    nu: f64,
) -> Result<f64> {
    check_positive(&[
        ("radius", radius),
        ("thickness", thickness),
        ("wrinkle count", wrinkles),
        ("gauge pressure", pressure),
    ])?;
    ensure(nu > 0.0 && nu < 0.5, || {
        format!("Poisson's ratio must lie in (0, 0.5), got {nu}")
    })?;
    let ratio = WRINKLE_PREFACTOR * radius / (wrinkles * thickness);
    Ok((12.0 * (1.0 - nu * nu)).sqrt() * ratio * ratio * pressure)
}

/// Young's modulus from an observed integer wrinkle count.
pub fn estimate_modulus_from_wrinkles(
    radius: f64,
    thickness: f64,
    wrinkles: u32,
    pressure: f64,
    nu: f64,
) -> Result<f64> {
    ensure(wrinkles >= 1, || {
        "wrinkle count must be at least 1".to_string()
    })?;
    modulus_from_wrinkle_number(radius, thickness, f64::from(wrinkles), pressure, nu)
}

/// Young's modulus from the physical depth at which wrinkles first appear.
/// The onset is hard to observe and errors in it pass straight into the
/// result, so the estimate is always tagged unreliable.
pub fn estimate_modulus_from_critical_depth(
    radius: f64,
    thickness: f64,
    critical_depth: f64,
    pressure: f64,
) -> Result<ModulusEstimate> {
    check_positive(&[
        ("radius", radius),
        ("thickness", thickness),
        ("critical depth", critical_depth),
        ("gauge pressure", pressure),
    ])?;
    let modulus = CRITICAL_DEPTH * pressure * radius * radius / (thickness * critical_depth);
    ensure(modulus.is_finite(), || {
        format!("critical depth {critical_depth} m is too small to give a finite modulus")
    })?;
    warn!("modulus from the wrinkling onset depth is unreliable; prefer the wrinkle count");
    Ok(ModulusEstimate {
        modulus,
        reliability: Reliability::Unreliable,
    })
}

/// Physical onset depth predicted for a shell with the given properties.
pub fn critical_depth_for(radius: f64, thickness: f64, modulus: f64, pressure: f64) -> f64 {
    CRITICAL_DEPTH * pressure * radius * radius / (thickness * modulus)
}

/// Real-valued wrinkle number predicted for a shell with the given properties.
pub fn wrinkle_number_for(
    radius: f64,
    thickness: f64,
    modulus: f64,
    pressure: f64,
    nu: f64,
) -> f64 {
    WRINKLE_PREFACTOR * radius / thickness
        * ((12.0 * (1.0 - nu * nu)).sqrt() * pressure / modulus).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn pezzi_ball_example() {
        let e = estimate_modulus_from_wrinkles(0.13, 8.6e-4, 8, 1300.0, 0.4).unwrap();
        assert!((e - 2.6e6).abs() / 2.6e6 < 0.01, "{e}");
    }

    #[test]
    fn poisson_ratio_sensitivity() {
        let a = estimate_modulus_from_wrinkles(0.13, 8.6e-4, 8, 1300.0, 0.3).unwrap();
        let b = estimate_modulus_from_wrinkles(0.13, 8.6e-4, 8, 1300.0, 0.4).unwrap();
        assert_relative_eq!(b / a, (0.84f64 / 0.91).sqrt(), max_relative = 1e-12);
        assert!(((a - b) / b - 0.041).abs() < 0.003);
    }

    #[test]
    fn doubling_wrinkles_quarters_modulus() {
        let a = estimate_modulus_from_wrinkles(0.13, 8.6e-4, 8, 1300.0, 0.4).unwrap();
        let b = estimate_modulus_from_wrinkles(0.13, 8.6e-4, 16, 1300.0, 0.4).unwrap();
        assert_relative_eq!(a / b, 4.0, max_relative = 1e-12);
    }

    #[test]
    fn critical_depth_estimate_is_tagged_and_guarded() {
        let e = estimate_modulus_from_critical_depth(0.13, 8.6e-4, 0.004, 1300.0).unwrap();
        assert_eq!(e.reliability, Reliability::Unreliable);
        let h = estimate_modulus_from_critical_depth(0.13, 8.6e-4, 0.008, 1300.0).unwrap();
        assert_relative_eq!(e.modulus / h.modulus, 2.0, max_relative = 1e-12);
        assert!(estimate_modulus_from_critical_depth(0.13, 8.6e-4, 0.0, 1300.0).is_err());
        assert!(estimate_modulus_from_critical_depth(0.13, 8.6e-4, 1e-320, 1300.0).is_err());
        assert!(estimate_modulus_from_wrinkles(0.13, 8.6e-4, 0, 1300.0, 0.4).is_err());
    }

    proptest! {
        #[test]
        fn both_relations_invert_consistently(
            e in 1e5f64..1e8, pg in 100.0f64..1e4, r in 0.02f64..1.0,
            frac in 1e-4f64..1e-2, nu in 0.05f64..0.49,
        ) {
            let h = r * frac;
            let wc = critical_depth_for(r, h, e, pg);
            let n = wrinkle_number_for(r, h, e, pg, nu);
            prop_assume!(n >= 1.0);
            let from_depth = estimate_modulus_from_critical_depth(r, h, wc, pg).unwrap().modulus;
            let from_count = modulus_from_wrinkle_number(r, h, n, pg, nu).unwrap();
            prop_assert!((from_depth - e).abs() <= 1e-9 * e);
            prop_assert!((from_count - e).abs() <= 1e-9 * e);
        }

        #[test]
        fn depends_on_radius_to_thickness_ratio_only(c in 0.1f64..10.0, n in 1u32..40) {
            let a = estimate_modulus_from_wrinkles(0.13, 8.6e-4, n, 1300.0, 0.4).unwrap();
            let b = estimate_modulus_from_wrinkles(0.13 * c, 8.6e-4 * c, n, 1300.0, 0.4).unwrap();
            prop_assert!((a - b).abs() <= 1e-12 * a);
        }
    }
}

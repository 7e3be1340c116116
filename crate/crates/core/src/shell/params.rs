use serde::{Deserialize, Serialize};

use crate::error::{ensure, Result};

/// Geometric and material description of a locally spherical shell patch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShellParams {
    /// Curvature radius R in meters.
    pub radius: f64,
    /// Wall thickness h in meters.
    pub thickness: f64,
    /// Young's modulus E in pascals.
    pub youngs_modulus: f64,
    /// Poisson's ratio.
    pub nu: f64,
    /// Gauge pressure P_in - P_out in pascals.
    pub gauge_pressure: f64,
}

impl ShellParams {
    pub fn new(
        radius: f64,
        thickness: f64,
        youngs_modulus: f64,
        nu: f64,
        gauge_pressure: f64,
    ) -> Result<Self> {
        let p = Self {
            radius,
            thickness,
            youngs_modulus,
            nu,
            gauge_pressure,
        };
        p.validate()?;
        Ok(p)
    }

    /// Parameters with the given bendability; the gauge pressure is solved for.
    pub fn with_tau(
        radius: f64,
        thickness: f64,
        youngs_modulus: f64,
        nu: f64,
        tau: f64,
    ) -> Result<Self> {
        let mut p = Self::new(radius, thickness, youngs_modulus, nu, 1.0)?;
        ensure(tau.is_finite() && tau > 0.0, || {
            format!("tau must be positive, got {tau}")
        })?;
        p.gauge_pressure =
            tau * (youngs_modulus * thickness * p.bending_stiffness()).sqrt() / (radius * radius);
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("radius", self.radius),
            ("thickness", self.thickness),
            ("Young's modulus", self.youngs_modulus),
            ("gauge pressure", self.gauge_pressure),
        ] {
            ensure(v.is_finite() && v > 0.0, || {
                format!("{name} must be positive, got {v}")
            })?;
        }
        ensure(self.nu > 0.0 && self.nu < 0.5, || {
            format!("Poisson's ratio must lie in (0, 0.5), got {}", self.nu)
        })?;
        let tau = self.tau();
        ensure(tau.is_finite() && tau > 0.0, || {
            format!("bendability tau = {tau} is not finite and positive")
        })
    }

    /// B = E h^3 / (12 (1 - nu^2)).
    pub fn bending_stiffness(&self) -> f64 {
        self.youngs_modulus * self.thickness.powi(3) / (12.0 * (1.0 - self.nu * self.nu))
    }

    /// l_p = (P_g R^3 / (E h))^(1/2).
    pub fn capillary_length(&self) -> f64 {
        (self.gauge_pressure * self.radius.powi(3) / (self.youngs_modulus * self.thickness)).sqrt()
    }

    /// tau = P_g R^2 / (E h B)^(1/2).
    pub fn tau(&self) -> f64 {
        self.gauge_pressure * self.radius * self.radius
            / (self.youngs_modulus * self.thickness * self.bending_stiffness()).sqrt()
    }

    /// Physical depth (m, positive inward) to dimensionless W (negative inward).
    pub fn depth_to_dimensionless(&self, depth: f64) -> f64 {
        -depth * self.radius / self.capillary_length().powi(2)
    }

    pub fn dimensionless_to_depth(&self, w: f64) -> f64 {
        -w * self.capillary_length().powi(2) / self.radius
    }

    /// Dimensional point force from `F / (P_g l_p^2)`.
    pub fn dimensionless_to_force(&self, f: f64) -> f64 {
        f * self.gauge_pressure * self.capillary_length().powi(2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn pezzi_ball_is_near_tau_forty() {
        let p = ShellParams::new(0.13, 8.6e-4, 2.34e6, 0.4, 1300.0).unwrap();
        assert!((p.tau() - 40.0).abs() < 1.0, "{}", p.tau());
    }

    #[test]
    fn with_tau_round_trips() {
        let p = ShellParams::with_tau(0.1, 1e-3, 1e6, 0.4, 400.0).unwrap();
        assert_relative_eq!(p.tau(), 400.0, max_relative = 1e-12);
    }

    #[test]
    fn rejects_bad_values() {
        assert!(ShellParams::new(0.1, 1e-3, 1e6, 0.5, 100.0).is_err());
        assert!(ShellParams::new(0.1, 0.0, 1e6, 0.4, 100.0).is_err());
        assert!(ShellParams::new(0.1, 1e-3, 1e6, 0.4, -1.0).is_err());
    }

    #[test]
    fn depth_conversion_inverts() {
        let p = ShellParams::new(0.13, 8.6e-4, 2.34e6, 0.4, 1300.0).unwrap();
        let w = p.depth_to_dimensionless(0.01);
        assert!(w < 0.0);
        assert_relative_eq!(p.dimensionless_to_depth(w), 0.01, max_relative = 1e-14);
    }
}

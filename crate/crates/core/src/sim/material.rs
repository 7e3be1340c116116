use serde::{Deserialize, Serialize};

use crate::error::{ensure, Result};

/// Atmospheric pressure used by the isothermal gas model, in pascals.
pub const ATMOSPHERIC_PRESSURE: f64 = 101_325.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GasModel {
    /// Gauge pressure held at its initial value.
    #[default]
    ConstantPressure,
    /// `(P_atm + P_g) V` held constant.
    Isothermal,
}

/// Surface material of a pressurized membrane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaterialSpec {
    #[serde(rename = "E")]
    pub youngs_modulus: f64,
    pub nu: f64,
    #[serde(rename = "h")]
    pub thickness: f64,
    /// Volumetric density of the wall material in kg/m^3.
    pub density: f64,
    #[serde(rename = "Pg0")]
    pub initial_pressure: f64,
    #[serde(default)]
    pub gas_model: GasModel,
}

impl MaterialSpec {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("Young's modulus", self.youngs_modulus),
            ("thickness", self.thickness),
            ("density", self.density),
            ("initial gauge pressure", self.initial_pressure),
        ] {
            ensure(v.is_finite() && v > 0.0, || {
                format!("{name} must be positive, got {v}")
            })?;
        }
        ensure(self.nu > 0.0 && self.nu < 0.5, || {
            format!("Poisson's ratio must lie in (0, 0.5), got {}", self.nu)
        })
    }

    /// Shear modulus times thickness, N/m.
    pub fn shear_stiffness(&self) -> f64 {
        self.thickness * self.youngs_modulus / (2.0 * (1.0 + self.nu))
    }

    /// Plane-stress first Lame parameter times thickness, N/m.
    pub fn lame_stiffness(&self) -> f64 {
        self.thickness * self.youngs_modulus * self.nu / (1.0 - self.nu * self.nu)
    }

    /// Mass per unit reference area, kg/m^2.
    pub fn areal_density(&self) -> f64 {
        self.density * self.thickness
    }
}

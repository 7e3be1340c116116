use log::warn;
use serde::Serialize;

use super::params::ShellParams;
use crate::error::{ensure, Result};

/// Prefactor of the wrinkle-count law `n = c * tau^(1/2)`.
pub const WRINKLE_PREFACTOR: f64 = 1.33;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WrinkleCount {
    pub unrounded: f64,
    pub count: u32,
}

/// Expected number of radial wrinkles around a deep indentation.
pub fn wrinkle_count(params: &ShellParams) -> WrinkleCount {
    wrinkle_count_for_tau(params.tau())
}

pub fn wrinkle_count_for_tau(tau: f64) -> WrinkleCount {
    let unrounded = WRINKLE_PREFACTOR * tau.sqrt();
    WrinkleCount {
        unrounded,
        // Half-up rounding.
        count: (unrounded + 0.5).floor() as u32,
    }
}

/// Inverted-cap approximation of a deep indentation: the indented region
/// is the mirror image of the original spherical cap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CapProfile {
    pub w0: f64,
}

impl CapProfile {
    /// Radius at which the cap meets the undeformed shell.
    pub fn edge(&self) -> f64 {
        self.w0.abs().sqrt()
    }

    pub fn eval(&self, rho: f64) -> f64 {
        let rho = rho.abs();
        if rho <= self.edge() {
            -self.w0.abs() + rho * rho
        } else {
            0.0
        }
    }
}

pub fn cap_profile(w0: f64) -> Result<CapProfile> {
    ensure(w0.is_finite() && w0 <= 0.0, || {
        format!("cap depth W0 must be <= 0, got {w0}")
    })?;
    if w0.abs() < 1.0 {
        warn!(
            "inverted-cap profile requested at |W0| = {} < 1, outside its regime",
            w0.abs()
        );
    }
    Ok(CapProfile { w0 })
}

/// Volume displaced by an inverted cap of physical depth `depth` (m).
pub fn cap_volume_change(params: &ShellParams, depth: f64) -> Result<f64> {
    ensure(depth.is_finite() && depth > 0.0, || {
        format!("indentation depth must be positive, got {depth}")
    })?;
    Ok(0.5 * std::f64::consts::PI * params.radius * depth * depth)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn wrinkle_examples() {
        let w = wrinkle_count_for_tau(40.0);
        assert_relative_eq!(w.unrounded, 8.41, epsilon = 5e-3);
        assert_eq!(w.count, 8);
        assert_eq!(wrinkle_count_for_tau(1.0).count, 1);
        assert_eq!(wrinkle_count_for_tau(400.0).count, 27);
    }

    #[test]
    fn cap_examples() {
        let c = cap_profile(-4.0).unwrap();
        assert_eq!(c.eval(0.0), -4.0);
        assert_eq!(c.eval(2.0), 0.0);
        assert_eq!(cap_profile(-9.0).unwrap().eval(1.0), -8.0);
        assert!(cap_profile(0.5).is_err());
    }

    #[test]
    fn volume_examples() {
        let p = ShellParams::new(0.13, 8.6e-4, 2.34e6, 0.4, 1300.0).unwrap();
        assert_relative_eq!(
            cap_volume_change(&p, 0.01).unwrap(),
            2.042e-5,
            max_relative = 1e-3
        );
        assert!(cap_volume_change(&p, 0.0).is_err());
    }

    proptest! {
        #[test]
        fn cap_is_continuous_at_its_edge(w0 in -50.0f64..-1.0) {
            let c = cap_profile(w0).unwrap();
            let e = c.edge();
            prop_assert!((c.eval(e * (1.0 - 1e-9)) - c.eval(e * (1.0 + 1e-9))).abs() < 1e-6);
        }

        #[test]
        fn volume_is_quadratic(d in 1e-4f64..0.1) {
            let p = ShellParams::new(0.13, 8.6e-4, 2.34e6, 0.4, 1300.0).unwrap();
            let a = cap_volume_change(&p, d).unwrap();
            let b = cap_volume_change(&p, 2.0 * d).unwrap();
            prop_assert!((b / a - 4.0).abs() < 1e-12);
        }
    }
}

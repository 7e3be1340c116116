//! Non-invasive estimation of the gauge pressure and surface elastic modulus of
//! inflated objects from point-indentation measurements.
//!
//! The crate is organised around the measurement-to-estimate workflow:
//!
//! - [`measurement`]: force/depth indentation series and drop tests.
//! - [`geometry`]: triangle meshes, local curvature fits and enclosed volume.
//! - [`shell`]: the nondimensional pressurized shallow-shell boundary-value
//!   problem, wrinkling diagnostics and the inverted-cap approximation.
//! - [`estimator`]: calibration of the pressure/stiffness scaling factor and the
//!   pressure and modulus estimators built on it.
//! - [`sim`]: a pressurized Neo-Hookean membrane simulator used to generate
//!   synthetic measurements and to replay indentation and drop scenarios.

pub mod error;
pub mod estimator;
pub mod geometry;
pub mod measurement;
pub mod shell;
pub mod sim;

pub use error::{Error, ErrorKind, Result};

/// Poisson's ratio assumed when none is supplied.
pub const DEFAULT_NU: f64 = 0.4;

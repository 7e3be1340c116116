use serde::{Deserialize, Serialize};

use crate::error::{ensure, Result};
use crate::geometry::Point3;

/// Half-space collider `{x : (x - point) . normal >= 0}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Plane {
    pub point: [f64; 3],
    pub normal: [f64; 3],
}

impl Plane {
    pub fn ground(height: f64) -> Self {
        Self {
            point: [0.0, 0.0, height],
            normal: [0.0, 0.0, 1.0],
        }
    }

    pub fn origin(&self) -> Point3 {
        Point3::from(self.point)
    }

    /// Unit normal.
    pub fn unit_normal(&self) -> Point3 {
        Point3::from(self.normal).normalize()
    }

    /// Signed distance of `x` above the plane.
    pub fn height(&self, x: &Point3) -> f64 {
        (x - self.origin()).dot(&self.unit_normal())
    }
}

fn default_axis() -> [f64; 3] {
    [0.0, 0.0, -1.0]
}
fn default_speed() -> f64 {
    0.01
}
fn default_increment() -> f64 {
    0.005
}
fn default_kinetic_tolerance() -> f64 {
    1e-6
}
fn default_relax_damping() -> f64 {
    100.0
}
fn default_max_relax_steps() -> usize {
    400_000
}
fn default_settle_window() -> f64 {
    0.05
}

/// Point indenter acting on one mesh vertex.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndenterSpec {
    /// Driven vertex; defaults to the vertex farthest against `axis`.
    #[serde(default)]
    pub vertex: Option<usize>,
    /// Direction of travel into the object.
    #[serde(default = "default_axis")]
    pub axis: [f64; 3],
    /// Advance speed in m/s.
    #[serde(default = "default_speed")]
    pub speed: f64,
    /// Depth between recorded samples, m.
    #[serde(default = "default_increment")]
    pub increment: f64,
    /// Travel after which a dynamic run holds the indenter still, m.
    #[serde(default)]
    pub max_depth: Option<f64>,
    /// Kinetic energy below which the object counts as relaxed, J.
    #[serde(default = "default_kinetic_tolerance")]
    pub kinetic_tolerance: f64,
    /// Viscous damping rate used while relaxing, 1/s.
    #[serde(default = "default_relax_damping")]
    pub relax_damping: f64,
    #[serde(default = "default_max_relax_steps")]
    pub max_relax_steps: usize,
    /// Time the kinetic energy must stay below tolerance, s. Guards against
    /// stopping at the turning point of an oscillation.
    #[serde(default = "default_settle_window")]
    pub settle_window: f64,
    /// Geodesic radius of the patch used to fit the local curvature, m.
    #[serde(default)]
    pub patch_radius: Option<f64>,
}

impl Default for IndenterSpec {
    fn default() -> Self {
        Self {
            vertex: None,
            axis: default_axis(),
            speed: default_speed(),
            increment: default_increment(),
            max_depth: None,
            kinetic_tolerance: default_kinetic_tolerance(),
            relax_damping: default_relax_damping(),
            max_relax_steps: default_max_relax_steps(),
            settle_window: default_settle_window(),
            patch_radius: None,
        }
    }
}

impl IndenterSpec {
    pub fn unit_axis(&self) -> Point3 {
        Point3::from(self.axis).normalize()
    }

    pub fn validate(&self) -> Result<()> {
        let axis = Point3::from(self.axis);
        ensure(
            axis.iter().all(|c| c.is_finite()) && axis.norm() > 0.0,
            || "indenter axis must be a nonzero vector".to_string(),
        )?;
        ensure(self.speed > 0.0 && self.speed <= 0.01 + 1e-12, || {
            format!(
                "indenter speed must lie in (0, 0.01] m/s, got {}",
                self.speed
            )
        })?;
        ensure(self.increment.is_finite() && self.increment > 0.0, || {
            format!("depth increment must be positive, got {}", self.increment)
        })?;
        ensure(self.kinetic_tolerance > 0.0, || {
            "kinetic tolerance must be positive".into()
        })?;
        ensure(self.relax_damping >= 0.0, || {
            "relaxation damping must be >= 0".into()
        })?;
        ensure(self.max_relax_steps > 0, || {
            "max_relax_steps must be positive".into()
        })?;
        ensure(
            self.settle_window.is_finite() && self.settle_window >= 0.0,
            || "settle window must be >= 0".into(),
        )
    }
}

fn default_gravity() -> [f64; 3] {
    [0.0, 0.0, -9.81]
}
fn default_restitution() -> f64 {
    1.0
}
fn default_dt() -> f64 {
    1e-4
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    #[serde(default = "default_gravity")]
    pub gravity: [f64; 3],
    #[serde(default)]
    pub planes: Vec<Plane>,
    /// Target coefficient of restitution for impacts on the planes.
    #[serde(default = "default_restitution")]
    pub restitution: f64,
    #[serde(default)]
    pub indenter: Option<IndenterSpec>,
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default)]
    pub duration: f64,
    /// Viscous damping rate applied to all velocities, 1/s.
    #[serde(default)]
    pub damping: f64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            gravity: default_gravity(),
            planes: Vec::new(),
            restitution: default_restitution(),
            indenter: None,
            dt: default_dt(),
            duration: 0.0,
            damping: 0.0,
        }
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        ensure(self.dt.is_finite() && self.dt > 0.0, || {
            format!("dt must be positive, got {}", self.dt)
        })?;
        ensure(self.restitution > 0.0 && self.restitution <= 1.0, || {
            format!("restitution must lie in (0, 1], got {}", self.restitution)
        })?;
        ensure(self.duration.is_finite() && self.duration >= 0.0, || {
            format!("duration must be >= 0, got {}", self.duration)
        })?;
        ensure(self.damping.is_finite() && self.damping >= 0.0, || {
            format!("damping must be >= 0, got {}", self.damping)
        })?;
        ensure(self.gravity.iter().all(|g| g.is_finite()), || {
            "gravity must be finite".into()
        })?;
        for p in &self.planes {
            ensure(Point3::from(p.normal).norm() > 0.0, || {
                "plane normal must be nonzero".into()
            })?;
        }
        if let Some(ind) = &self.indenter {
            ind.validate()?;
        }
        Ok(())
    }

    pub fn gravity_vector(&self) -> Point3 {
        Point3::from(self.gravity)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }
}

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::material::MaterialSpec;
use super::measure::{contact_diameter, height, measure_deformation};
use super::scenario::{Plane, ScenarioConfig};
use super::state::{init_sim, SimState};
use crate::error::{ensure, Error, Result};
use crate::geometry::{Point3, TriMesh};

/// Tracked quantities at one instant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Frame {
    pub step: usize,
    pub time: f64,
    pub centroid: [f64; 3],
    /// Lowest point above the first plane, if any.
    pub clearance: Option<f64>,
    pub height: f64,
    pub upper_diameter: Option<f64>,
    pub contact_diameter: Option<f64>,
    pub sunken_depth: Option<f64>,
    pub volume: f64,
    pub pressure: f64,
    pub kinetic_energy: f64,
}

pub const TRAJECTORY_HEADER: &str =
    "time,centroid_x,centroid_y,centroid_z,clearance,H,Du,Dl,d,volume,Pg,kinetic_energy";

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn trajectory_csv(frames: &[Frame]) -> String {
    let mut out = String::from(TRAJECTORY_HEADER);
    out.push('\n');
    for f in frames {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            f.time,
            f.centroid[0],
            f.centroid[1],
            f.centroid[2],
            opt(f.clearance),
            f.height,
            opt(f.upper_diameter),
            opt(f.contact_diameter),
            opt(f.sunken_depth),
            f.volume,
            f.pressure,
            f.kinetic_energy
        );
    }
    out
}

pub fn capture(state: &SimState, config: &ScenarioConfig, step: usize) -> Frame {
    let ground = config.planes.first().copied().unwrap_or(Plane::ground(0.0));
    let deformation = measure_deformation(state, &ground).ok();
    let clearance = config.planes.first().map(|p| {
        state
            .mesh
            .vertices
            .iter()
            .map(|x| p.height(x))
            .fold(f64::INFINITY, f64::min)
    });
    let c = state.mesh.centroid();
    Frame {
        step,
        time: state.time,
        centroid: [c.x, c.y, c.z],
        clearance,
        height: height(state, &ground),
        upper_diameter: deformation.map(|d| d.upper_diameter),
        contact_diameter: contact_diameter(state, &ground).ok(),
        sunken_depth: deformation.map(|d| d.sunken_depth),
        volume: state.volume,
        pressure: state.pressure,
        kinetic_energy: state.kinetic_energy(),
    }
}

/// Steps for `config.duration`, capturing a frame every `frame_every` steps
/// (and at the start and end). `on_frame` sees each captured state.
pub fn run_scenario(
    state: &mut SimState,
    config: &ScenarioConfig,
    frame_every: usize,
    mut on_frame: impl FnMut(&Frame, &SimState) -> Result<()>,
) -> Result<Vec<Frame>> {
    config.validate()?;
    let frame_every = frame_every.max(1);
    let steps = (config.duration / config.dt).round() as usize;
    let hold_after = config.indenter.and_then(|i| i.max_depth);
    let mut travel = 0.0;
    let mut frames = vec![capture(state, config, 0)];
    on_frame(&frames[0], state)?;
    for k in 1..=steps {
        if let (Some(limit), Some(c)) = (hold_after, state.constraint.as_mut()) {
            travel += c.velocity.norm() * config.dt;
            if travel >= limit {
                c.velocity = Point3::zeros();
            }
        }
        state.step(config).map_err(|e| match e {
            Error::SimulationInstability { face, reason } => Error::SimulationInstability {
                face,
                reason: format!("{reason} (step {k}, frame {})", k / frame_every),
            },
            other => other,
        })?;
        if k % frame_every == 0 || k == steps {
            let f = capture(state, config, k);
            on_frame(&f, state)?;
            frames.push(f);
        }
    }
    Ok(frames)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SimulationMode {
    #[default]
    Dynamic,
    Indent,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IcosphereSpec {
    pub radius: f64,
    pub subdivisions: u32,
}

fn default_frame_every() -> usize {
    100
}

/// Everything a simulation run needs besides an optional external mesh.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationSetup {
    pub material: MaterialSpec,
    #[serde(flatten)]
    pub scenario: ScenarioConfig,
    #[serde(default)]
    pub mode: SimulationMode,
    /// Mesh used when none is supplied separately.
    #[serde(default)]
    pub icosphere: Option<IcosphereSpec>,
    /// Initial clearance of the lowest vertex above the first plane, m.
    #[serde(default)]
    pub drop_height: Option<f64>,
    #[serde(default)]
    pub initial_velocity: Option<[f64; 3]>,
    /// Total travel for indentation runs, m.
    #[serde(default)]
    pub target_depth: Option<f64>,
    #[serde(default = "default_frame_every")]
    pub frame_every: usize,
}

impl SimulationSetup {
    pub fn from_json(text: &str) -> Result<Self> {
        let setup: Self = serde_json::from_str(text)?;
        setup.validate()?;
        Ok(setup)
    }

    pub fn validate(&self) -> Result<()> {
        self.material.validate()?;
        self.scenario.validate()?;
        if let Some(h) = self.drop_height {
            ensure(h.is_finite() && h >= 0.0, || {
                format!("drop height must be >= 0, got {h}")
            })?;
            ensure(!self.scenario.planes.is_empty(), || {
                "drop height needs at least one plane".to_string()
            })?;
        }
        if self.mode == SimulationMode::Indent {
            ensure(self.scenario.indenter.is_some(), || {
                "indent mode needs an indenter".to_string()
            })?;
            ensure(self.target_depth.is_some_and(|d| d > 0.0), || {
                "indent mode needs a positive target_depth".to_string()
            })?;
        }
        Ok(())
    }

    /// Mesh from the setup, or `mesh` when given.
    pub fn build_mesh(&self, mesh: Option<TriMesh>) -> Result<TriMesh> {
        match (mesh, self.icosphere) {
            (Some(m), _) => Ok(m),
            (None, Some(s)) => {
                ensure(s.radius > 0.0 && s.subdivisions <= 6, || {
                    "icosphere needs a positive radius and at most 6 subdivisions".to_string()
                })?;
                Ok(TriMesh::icosphere(s.radius, s.subdivisions))
            }
            (None, None) => Err(Error::Validation(
                "no mesh given and the setup has no icosphere".into(),
            )),
        }
    }

    /// Initial state: the mesh placed at the drop height and given the
    /// initial velocity.
    pub fn initial_state(&self, mesh: TriMesh) -> Result<SimState> {
        let mut state = init_sim(mesh, self.material)?;
        if let (Some(h), Some(plane)) = (self.drop_height, self.scenario.planes.first()) {
            let lowest = state
                .mesh
                .vertices
                .iter()
                .map(|x| plane.height(x))
                .fold(f64::INFINITY, f64::min);
            state.translate(plane.unit_normal() * (h - lowest));
        }
        if let Some(v) = self.initial_velocity {
            state.set_uniform_velocity(Point3::from(v));
        }
        Ok(state)
    }
}

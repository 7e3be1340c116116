//! Forward simulator of a closed, pressurized, Neo-Hookean membrane.
//!
//! The digitized (already inflated) shape is the reference configuration;
//! a per-face prestress balances the gas pressure there, so the rest state
//! is an exact equilibrium. Time integration is explicit velocity Verlet
//! with lumped masses. Planes are frictionless and an impact's outgoing
//! center-of-mass velocity is set from a target coefficient of restitution.

mod element;
mod indent;
mod material;
mod measure;
mod prestress;
mod scenario;
mod state;
mod trajectory;

pub use element::MIN_AREA_RATIO;
pub use indent::{indent_virtual, indentation_depths, leading_vertex};
pub use material::{GasModel, MaterialSpec, ATMOSPHERIC_PRESSURE};
pub use measure::{contact_diameter, height, measure_deformation, Deformation, CONTACT_TOLERANCE};
pub use scenario::{IndenterSpec, Plane, ScenarioConfig};
pub use state::{init_sim, SimState, VertexConstraint, RESTING_CONTACT_SPEED};
pub use trajectory::{
    capture, run_scenario, trajectory_csv, Frame, IcosphereSpec, SimulationMode, SimulationSetup,
    TRAJECTORY_HEADER,
};

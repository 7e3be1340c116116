use log::{debug, info};

use super::scenario::{IndenterSpec, ScenarioConfig};
use super::state::{SimState, VertexConstraint};
use crate::error::{Error, Result};
use crate::geometry::{fit_curvature, select_patch, Point3};
use crate::measurement::{IndentationSample, IndentationSeries, MIN_SAMPLES};

/// Force-free steps allowed while the object settles before indentation.
const SETTLE_FACTOR: usize = 4;

/// Steps with damping until the kinetic energy drops below the tolerance.
fn relax(
    state: &mut SimState,
    config: &ScenarioConfig,
    spec: &IndenterSpec,
    max_steps: usize,
) -> Result<usize> {
    let window = (spec.settle_window / config.dt).ceil() as usize;
    let mut quiet = 0;
    for k in 0..max_steps {
        state.step_with_damping(config, spec.relax_damping)?;
        if state.kinetic_energy() < spec.kinetic_tolerance {
            quiet += 1;
            if quiet > window {
                return Ok(k + 1);
            }
        } else {
            quiet = 0;
        }
    }
    Err(Error::RelaxationTimeout {
        steps: max_steps,
        kinetic_energy: state.kinetic_energy(),
    })
}

/// Default indenter vertex: the one farthest against the travel direction.
pub fn leading_vertex(state: &SimState, axis: &Point3) -> usize {
    state
        .mesh
        .vertices
        .iter()
        .enumerate()
        .max_by(|a, b| (-a.1.dot(axis)).total_cmp(&-b.1.dot(axis)))
        .map(|(i, _)| i)
        .expect("mesh has vertices")
}

/// Depths at which samples are recorded.
pub fn indentation_depths(target: f64, increment: f64) -> Vec<f64> {
    if target.is_nan() || target <= 0.0 {
        return Vec::new();
    }
    let steps = (target / increment + 1e-9).floor() as usize;
    let mut depths: Vec<f64> = (1..=steps).map(|k| k as f64 * increment).collect();
    if depths.last().is_none_or(|&d| target - d > 1e-9 * target) {
        depths.push(target);
    }
    depths
}

/// Quasi-static virtual indentation. The driven vertex advances at the
/// indenter speed; at each recorded depth the object is relaxed and the
/// reaction along the axis is taken as the indentation force. The series
/// carries the curvature radius fitted around the indenter and the wall
/// thickness.
pub fn indent_virtual(
    state: &mut SimState,
    config: &ScenarioConfig,
    target_depth: f64,
) -> Result<IndentationSeries> {
    config.validate()?;
    let spec = config
        .indenter
        .ok_or_else(|| Error::Validation("scenario has no indenter".into()))?;
    let depths = indentation_depths(target_depth, spec.increment);
    if depths.len() < MIN_SAMPLES {
        return Err(Error::InsufficientData(format!(
            "target depth {target_depth} m with increment {} m gives {} samples; at least {MIN_SAMPLES} are needed",
            spec.increment,
            depths.len()
        )));
    }
    let axis = spec.unit_axis();
    let vertex = match spec.vertex {
        Some(v) if v < state.mesh.vertex_count() => v,
        Some(v) => {
            return Err(Error::Index(format!(
                "indenter vertex {v} out of range (mesh has {} vertices)",
                state.mesh.vertex_count()
            )))
        }
        None => leading_vertex(state, &axis),
    };

    let patch_radius = spec
        .patch_radius
        .unwrap_or_else(|| 4.0 * state.rest_mesh.mean_edge_length());
    let fit = fit_curvature(&select_patch(&state.rest_mesh, vertex, patch_radius)?)?;

    let settle_steps = relax(state, config, &spec, SETTLE_FACTOR * spec.max_relax_steps)?;
    debug!("indentation: settled in {settle_steps} steps");

    let start = state.mesh.vertices[vertex];
    state.constraint = Some(VertexConstraint {
        vertex,
        position: start,
        velocity: axis * spec.speed,
    });
    let mut samples = Vec::with_capacity(depths.len());
    let mut travel = 0.0;
    for &depth in &depths {
        let mut c = state.constraint.expect("constraint set");
        c.velocity = axis * spec.speed;
        state.constraint = Some(c);
        while travel + spec.speed * config.dt < depth {
            state.step_with_damping(config, spec.relax_damping)?;
            travel += spec.speed * config.dt;
        }
        let mut c = state.constraint.expect("constraint set");
        c.position = start + axis * depth;
        c.velocity = Point3::zeros();
        state.constraint = Some(c);
        state.mesh.vertices[vertex] = c.position;
        travel = depth;
        let steps = relax(state, config, &spec, spec.max_relax_steps)?;
        let force = state
            .constraint_reaction(config)
            .expect("constraint set")
            .dot(&axis);
        info!("indentation depth {depth:.5} m: force {force:.5} N after {steps} relaxation steps");
        samples.push(IndentationSample::new(force, depth).map_err(|_| {
            Error::Validation(format!(
                "nonpositive reaction {force} N at depth {depth} m; the object is not supported"
            ))
        })?);
    }
    state.constraint = None;
    IndentationSeries::new("virtual", samples, fit.radius, state.material().thickness)
}

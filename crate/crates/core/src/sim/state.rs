use log::{debug, warn};
use nalgebra::Matrix2;

use super::element::RestElement;
use super::material::{GasModel, MaterialSpec, ATMOSPHERIC_PRESSURE};
use super::prestress::solve_prestress;
use super::scenario::ScenarioConfig;
use crate::error::{Error, Result};
use crate::geometry::{signed_volume, Point3, TriMesh};

/// Approach speed (m/s) below which an impact is treated as resting contact
/// and left alone by the restitution correction.
pub const RESTING_CONTACT_SPEED: f64 = 0.05;

/// Prestress residual above which initialization warns.
const PRESTRESS_WARN: f64 = 1e-8;

/// A vertex driven along a prescribed path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VertexConstraint {
    pub vertex: usize,
    pub position: Point3,
    pub velocity: Point3,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct ContactEpisode {
    approach_speed: f64,
}

/// Pressurized membrane: current and rest geometry plus dynamic state.
#[derive(Debug, Clone)]
pub struct SimState {
    pub mesh: TriMesh,
    pub velocities: Vec<Point3>,
    pub rest_mesh: TriMesh,
    pub volume: f64,
    /// Current gauge pressure, Pa.
    pub pressure: f64,
    pub time: f64,
    pub constraint: Option<VertexConstraint>,
    material: MaterialSpec,
    masses: Vec<f64>,
    elements: Vec<RestElement>,
    prestress: Vec<Matrix2<f64>>,
    prestress_residual: f64,
    rest_volume: f64,
    /// Elastic and pressure forces at the current positions.
    forces: Vec<Point3>,
    episodes: Vec<Option<ContactEpisode>>,
}

/// Builds the simulation state with `mesh` as the inflated reference shape.
pub fn init_sim(mesh: TriMesh, material: MaterialSpec) -> Result<SimState> {
    material.validate()?;
    mesh.ensure_watertight()?;
    let mut mesh = mesh;
    if signed_volume(&mesh) < 0.0 {
        debug!("mesh is inward oriented; flipping faces");
        for f in &mut mesh.faces {
            f.swap(1, 2);
        }
    }
    let volume = signed_volume(&mesh);
    if volume.is_nan() || volume <= 0.0 {
        return Err(Error::Validation(format!(
            "mesh encloses no volume ({volume})"
        )));
    }
    let mut elements = Vec::with_capacity(mesh.face_count());
    let mut masses = vec![0.0; mesh.vertex_count()];
    for (fi, face) in mesh.faces.iter().enumerate() {
        let e = RestElement::new(*face, mesh.face_points(fi)).ok_or_else(|| {
            Error::Validation(format!("face {fi} is degenerate in the rest mesh"))
        })?;
        for &v in face {
            masses[v] += material.areal_density() * e.area / 3.0;
        }
        elements.push(e);
    }
    if let Some(v) = masses.iter().position(|&m| m <= 0.0) {
        return Err(Error::Validation(format!("vertex {v} belongs to no face")));
    }

    let pressure_forces = pressure_forces(&mesh, material.initial_pressure);
    let target: Vec<Point3> = pressure_forces.iter().map(|f| -f).collect();
    let pre = solve_prestress(&elements, &target);
    debug!(
        "prestress: relative residual {:.3e} after {} iterations",
        pre.relative_residual, pre.iterations
    );
    if pre.relative_residual > PRESTRESS_WARN {
        warn!(
            "rest shape balanced only to {:.2e} relative; the initial state may drift",
            pre.relative_residual
        );
    }
    let n = mesh.vertex_count();
    let mut state = SimState {
        velocities: vec![Point3::zeros(); n],
        rest_mesh: mesh.clone(),
        mesh,
        volume,
        pressure: material.initial_pressure,
        time: 0.0,
        constraint: None,
        material,
        masses,
        elements,
        prestress: pre.stresses,
        prestress_residual: pre.relative_residual,
        rest_volume: volume,
        forces: vec![Point3::zeros(); n],
        episodes: Vec::new(),
    };
    state.forces = state.compute_forces()?;
    Ok(state)
}

fn pressure_forces(mesh: &TriMesh, pressure: f64) -> Vec<Point3> {
    let mut out = vec![Point3::zeros(); mesh.vertex_count()];
    add_pressure_forces(mesh, pressure, &mut out);
    out
}

fn add_pressure_forces(mesh: &TriMesh, pressure: f64, out: &mut [Point3]) {
    for (fi, face) in mesh.faces.iter().enumerate() {
        let share = mesh.face_area_vector(fi) * (pressure / 3.0);
        for &v in face {
            out[v] += share;
        }
    }
}

impl SimState {
    pub fn material(&self) -> &MaterialSpec {
        &self.material
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn total_mass(&self) -> f64 {
        self.masses.iter().sum()
    }

    pub fn prestress_residual(&self) -> f64 {
        self.prestress_residual
    }

    /// Elastic plus pressure force on each vertex, without gravity.
    pub fn internal_forces(&self) -> &[Point3] {
        &self.forces
    }

    /// Gauge pressure contribution to the vertex forces at the current shape.
    pub fn pressure_forces(&self) -> Vec<Point3> {
        pressure_forces(&self.mesh, self.pressure)
    }

    pub fn center_of_mass(&self) -> Point3 {
        let m: f64 = self.total_mass();
        self.mesh
            .vertices
            .iter()
            .zip(&self.masses)
            .fold(Point3::zeros(), |acc, (x, &mi)| acc + x * mi)
            / m
    }

    pub fn center_of_mass_velocity(&self) -> Point3 {
        self.velocities
            .iter()
            .zip(&self.masses)
            .fold(Point3::zeros(), |acc, (v, &mi)| acc + v * mi)
            / self.total_mass()
    }

    pub fn momentum(&self) -> Point3 {
        self.velocities
            .iter()
            .zip(&self.masses)
            .fold(Point3::zeros(), |acc, (v, &mi)| acc + v * mi)
    }

    pub fn kinetic_energy(&self) -> f64 {
        self.velocities
            .iter()
            .zip(&self.masses)
            .map(|(v, m)| 0.5 * m * v.norm_squared())
            .sum()
    }

    /// Kinetic, gravitational, elastic and gas energy.
    pub fn mechanical_energy(&self, config: &ScenarioConfig) -> f64 {
        let g = config.gravity_vector();
        let gravity: f64 = self
            .mesh
            .vertices
            .iter()
            .zip(&self.masses)
            .map(|(x, m)| -m * g.dot(x))
            .sum();
        let elastic: f64 = self
            .elements
            .iter()
            .zip(&self.prestress)
            .map(|(e, s)| e.energy(&self.mesh.vertices, &self.material, s))
            .sum();
        let gas = match self.material.gas_model {
            GasModel::ConstantPressure => -self.pressure * self.volume,
            GasModel::Isothermal => {
                let c = self.gas_constant();
                -(c * self.volume.ln() - ATMOSPHERIC_PRESSURE * self.volume)
            }
        };
        self.kinetic_energy() + gravity + elastic + gas
    }

    /// `(P_atm + P_g) V`, conserved by the isothermal model.
    pub fn gas_constant(&self) -> f64 {
        (ATMOSPHERIC_PRESSURE + self.material.initial_pressure) * self.rest_volume
    }

    fn update_pressure(&mut self) {
        self.volume = signed_volume(&self.mesh);
        if self.material.gas_model == GasModel::Isothermal {
            self.pressure = self.gas_constant() / self.volume - ATMOSPHERIC_PRESSURE;
        }
    }

    fn compute_forces(&self) -> Result<Vec<Point3>> {
        let x = &self.mesh.vertices;
        let mut out = vec![Point3::zeros(); x.len()];
        for (fi, (e, s)) in self.elements.iter().zip(&self.prestress).enumerate() {
            e.add_forces(x, &self.material, s, &mut out)
                .map_err(|ratio| Error::SimulationInstability {
                    face: fi,
                    reason: format!("area ratio {ratio:.3e} at t = {:.6} s", self.time),
                })?;
        }
        add_pressure_forces(&self.mesh, self.pressure, &mut out);
        Ok(out)
    }

    fn constrained(&self, v: usize) -> bool {
        self.constraint.is_some_and(|c| c.vertex == v)
    }

    /// Advances by one step of `config.dt` with the velocity Verlet scheme,
    /// then resolves plane contacts.
    pub fn step(&mut self, config: &ScenarioConfig) -> Result<()> {
        self.step_with_damping(config, config.damping)
    }

    pub(crate) fn step_with_damping(
        &mut self,
        config: &ScenarioConfig,
        damping: f64,
    ) -> Result<()> {
        let dt = config.dt;
        let g = config.gravity_vector();
        let com_velocity_before = self.center_of_mass_velocity();
        let n = self.masses.len();

        for i in 0..n {
            if !self.constrained(i) {
                self.velocities[i] += (self.forces[i] / self.masses[i] + g) * (0.5 * dt);
            }
        }
        for i in 0..n {
            let v = self.velocities[i];
            self.mesh.vertices[i] += v * dt;
        }
        if let Some(c) = &mut self.constraint {
            c.position += c.velocity * dt;
            self.mesh.vertices[c.vertex] = c.position;
            self.velocities[c.vertex] = c.velocity;
        }

        if self.episodes.len() != config.planes.len() {
            self.episodes = vec![None; config.planes.len()];
        }
        let mut touched = vec![false; config.planes.len()];
        let mut contacts: Vec<(usize, Point3)> = Vec::new();
        for (pi, plane) in config.planes.iter().enumerate() {
            let normal = plane.unit_normal();
            for i in 0..n {
                if self.constrained(i) {
                    continue;
                }
                let depth = plane.height(&self.mesh.vertices[i]);
                if depth < 0.0 {
                    self.mesh.vertices[i] -= normal * depth;
                    let vn = self.velocities[i].dot(&normal);
                    if vn < 0.0 {
                        self.velocities[i] -= normal * vn;
                    }
                    touched[pi] = true;
                    contacts.push((i, normal));
                }
            }
        }

        self.update_pressure();
        self.forces = self.compute_forces()?;
        for i in 0..n {
            if !self.constrained(i) {
                self.velocities[i] += (self.forces[i] / self.masses[i] + g) * (0.5 * dt);
            }
        }
        // The plane absorbs whatever the second half kick pushes into it.
        for &(i, normal) in &contacts {
            let vn = self.velocities[i].dot(&normal);
            if vn < 0.0 {
                self.velocities[i] -= normal * vn;
            }
        }
        if damping > 0.0 {
            let factor = 1.0 / (1.0 + damping * dt);
            for i in 0..n {
                if !self.constrained(i) {
                    self.velocities[i] *= factor;
                }
            }
        }
        self.time += dt;
        self.apply_restitution(config, &touched, com_velocity_before);

        let finite = self
            .mesh
            .vertices
            .iter()
            .chain(&self.velocities)
            .all(|v| v.iter().all(|c| c.is_finite()));
        if !finite || !self.pressure.is_finite() {
            return Err(Error::NotFinite { time: self.time });
        }
        Ok(())
    }

    /// An impact runs from the first contact with a plane until the body has
    /// left it and moves away; the outgoing center-of-mass normal velocity is
    /// then set to `restitution` times the approach speed.
    fn apply_restitution(&mut self, config: &ScenarioConfig, touched: &[bool], com_before: Point3) {
        for (pi, plane) in config.planes.iter().enumerate() {
            let normal = plane.unit_normal();
            match self.episodes[pi] {
                None if touched[pi] => {
                    self.episodes[pi] = Some(ContactEpisode {
                        approach_speed: -com_before.dot(&normal),
                    });
                }
                Some(ep) if !touched[pi] => {
                    let outgoing = self.center_of_mass_velocity().dot(&normal);
                    if outgoing <= 0.0 {
                        continue;
                    }
                    self.episodes[pi] = None;
                    if ep.approach_speed > RESTING_CONTACT_SPEED {
                        let shift = normal * (config.restitution * ep.approach_speed - outgoing);
                        for i in 0..self.velocities.len() {
                            if !self.constrained(i) {
                                self.velocities[i] += shift;
                            }
                        }
                    }
                }
                _ => {}
            }
        }
    }

    /// Rigidly moves the body and gives every vertex the same velocity.
    pub fn translate(&mut self, offset: Point3) {
        for x in &mut self.mesh.vertices {
            *x += offset;
        }
        if let Some(c) = &mut self.constraint {
            c.position += offset;
        }
    }

    pub fn set_uniform_velocity(&mut self, v: Point3) {
        self.velocities.iter_mut().for_each(|x| *x = v);
    }

    /// Reaction the constraint exerts on its vertex to hold it in place.
    pub fn constraint_reaction(&self, config: &ScenarioConfig) -> Option<Point3> {
        self.constraint
            .map(|c| -(self.forces[c.vertex] + config.gravity_vector() * self.masses[c.vertex]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::scenario::Plane;

    fn material() -> MaterialSpec {
        MaterialSpec {
            youngs_modulus: 2.34e6,
            nu: 0.4,
            thickness: 1e-3,
            density: 1000.0,
            initial_pressure: 1300.0,
            gas_model: GasModel::ConstantPressure,
        }
    }

    fn ball() -> SimState {
        init_sim(TriMesh::icosphere(0.13, 3), material()).unwrap()
    }

    #[test]
    fn lumped_mass_matches_the_sphere() {
        let s = ball();
        let exact = 1000.0 * 1e-3 * 4.0 * std::f64::consts::PI * 0.13f64.powi(2);
        assert!((s.total_mass() - exact).abs() / exact < 0.02);
        assert_eq!(s.kinetic_energy(), 0.0);
    }

    #[test]
    fn open_mesh_is_rejected() {
        let mut m = TriMesh::icosphere(0.13, 1);
        m.faces.pop();
        assert!(matches!(
            init_sim(m, material()),
            Err(Error::Topology { .. })
        ));
    }

    #[test]
    fn rest_shape_is_in_equilibrium() {
        let mut s = ball();
        assert!(s.prestress_residual() < 1e-10, "{}", s.prestress_residual());
        let before = s.mesh.vertices.clone();
        let cfg = ScenarioConfig {
            gravity: [0.0; 3],
            ..ScenarioConfig::default()
        };
        s.step(&cfg).unwrap();
        for (a, b) in before.iter().zip(&s.mesh.vertices) {
            assert!((a - b).norm() < 1e-9);
        }
    }

    #[test]
    fn pressure_forces_cancel_on_a_closed_mesh() {
        let s = ball();
        let f = s.pressure_forces();
        let total = f.iter().fold(Point3::zeros(), |a, b| a + b);
        let scale: f64 = f.iter().map(|x| x.norm()).sum();
        assert!(total.norm() < 1e-10 * scale);
    }

    #[test]
    fn stepping_is_deterministic() {
        let mut a = ball();
        a.translate(Point3::new(0.0, 0.0, 0.2));
        a.set_uniform_velocity(Point3::new(0.3, 0.0, -1.0));
        let mut b = a.clone();
        let cfg = ScenarioConfig {
            planes: vec![Plane::ground(0.0)],
            ..ScenarioConfig::default()
        };
        for _ in 0..300 {
            a.step(&cfg).unwrap();
            b.step(&cfg).unwrap();
        }
        assert_eq!(a.mesh.vertices, b.mesh.vertices);
        assert_eq!(a.velocities, b.velocities);
    }

    #[test]
    fn isothermal_gas_law_holds_each_step() {
        let m = MaterialSpec {
            gas_model: GasModel::Isothermal,
            ..material()
        };
        let mut s = init_sim(TriMesh::icosphere(0.13, 2), m).unwrap();
        s.translate(Point3::new(0.0, 0.0, 0.131));
        s.set_uniform_velocity(Point3::new(0.0, 0.0, -2.0));
        let cfg = ScenarioConfig {
            planes: vec![Plane::ground(0.0)],
            ..ScenarioConfig::default()
        };
        let c = s.gas_constant();
        for _ in 0..400 {
            s.step(&cfg).unwrap();
            let pv = (ATMOSPHERIC_PRESSURE + s.pressure) * s.volume;
            assert!((pv - c).abs() / c < 1e-6);
        }
    }
}

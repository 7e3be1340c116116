use inflato::estimator::{regress_pressure_hat, RegressionOptions};
use inflato::geometry::{Point3, TriMesh};
use inflato::measurement::IndentationSeries;
use inflato::sim::{
    indent_virtual, init_sim, measure_deformation, Deformation, GasModel, IndenterSpec,
    MaterialSpec, Plane, ScenarioConfig, SimState,
};
use inflato::Error;

fn material(modulus: f64, thickness: f64) -> MaterialSpec {
    MaterialSpec {
        youngs_modulus: modulus,
        nu: 0.4,
        thickness,
        density: 1000.0,
        initial_pressure: 1300.0,
        gas_model: GasModel::ConstantPressure,
    }
}

fn ball() -> SimState {
    init_sim(TriMesh::icosphere(0.13, 3), material(2.34e6, 8.6e-4)).unwrap()
}

fn resting(mut state: SimState) -> SimState {
    let lowest = state
        .mesh
        .vertices
        .iter()
        .map(|x| x.z)
        .fold(f64::INFINITY, f64::min);
    state.translate(Point3::new(0.0, 0.0, -lowest));
    state
}

fn indent_config(dt: f64) -> ScenarioConfig {
    ScenarioConfig {
        planes: vec![Plane::ground(0.0)],
        dt,
        indenter: Some(IndenterSpec::default()),
        ..Default::default()
    }
}

#[test]
fn free_fall_conserves_energy() {
    let mut state = ball();
    let cfg = ScenarioConfig {
        planes: vec![],
        ..Default::default()
    };
    let e0 = state.mechanical_energy(&cfg);
    let steps = (0.5 / cfg.dt).round() as usize;
    let mut worst: f64 = 0.0;
    for _ in 0..steps {
        state.step(&cfg).unwrap();
        worst = worst.max((state.mechanical_energy(&cfg) - e0).abs());
    }
    // Relative to the kinetic energy gained, the only energy that changes.
    let gained = state.kinetic_energy();
    assert!(worst < 0.01 * gained, "drift {worst} J vs {gained} J");
}

#[test]
fn free_fall_momentum_changes_only_by_gravity() {
    let mut state = ball();
    let cfg = ScenarioConfig {
        planes: vec![],
        ..Default::default()
    };
    let impulse = cfg.gravity_vector() * state.total_mass() * cfg.dt;
    for _ in 0..200 {
        let before = state.momentum();
        state.step(&cfg).unwrap();
        let change = state.momentum() - before;
        assert!((change - impulse).norm() < 1e-10 * impulse.norm().max(before.norm()));
    }
}

#[test]
fn sphere_at_rest_on_the_ground_is_undeformed() {
    let state = resting(ball());
    let d = measure_deformation(&state, &Plane::ground(0.0)).unwrap();
    assert!((d.height - 0.26).abs() < 1e-12);
    assert!(d.contact_diameter < 1e-9);
    assert!(d.sunken_depth < 1e-12);
}

#[test]
fn floating_sphere_has_no_contact() {
    let mut state = ball();
    state.translate(Point3::new(0.0, 0.0, 1.0));
    assert!(matches!(
        measure_deformation(&state, &Plane::ground(0.0)),
        Err(Error::EmptyContact)
    ));
}

#[test]
fn zero_depth_gives_insufficient_data() {
    let mut state = resting(ball());
    let err = indent_virtual(&mut state, &indent_config(5e-5), 0.0).unwrap_err();
    assert!(matches!(err, Error::InsufficientData(_)), "{err}");
}

fn indented(depth: f64, increment: f64) -> (IndentationSeries, Deformation) {
    let mut state = resting(ball());
    let mut cfg = indent_config(5e-5);
    if let Some(spec) = cfg.indenter.as_mut() {
        spec.increment = increment;
    }
    let series = indent_virtual(&mut state, &cfg, depth).unwrap();
    let shape = measure_deformation(&state, &Plane::ground(0.0)).unwrap();
    (series, shape)
}

#[test]
fn deeper_indentation_flattens_the_ball() {
    // The contact set is resolved only to about one mesh edge, so the two
    // loads differ enough for the contact patch to gain a ring of vertices.
    let (_, a) = indented(0.01, 0.0025);
    let (series, b) = indented(0.025, 0.005);
    assert!(b.height < a.height, "{a:?} -> {b:?}");
    assert!(b.contact_diameter > a.contact_diameter, "{a:?} -> {b:?}");
    assert!(b.sunken_depth > a.sunken_depth, "{a:?} -> {b:?}");
    let fit = regress_pressure_hat(&series, &RegressionOptions::default()).unwrap();
    assert!(fit.r2 > 0.95, "r2 {}", fit.r2);
    assert!((series.region_radius() - 0.13).abs() < 0.02 * 0.13);
    assert_eq!(series.region_thickness(), 8.6e-4);
    // Reaction force grows with depth.
    assert!(series.samples().windows(2).all(|w| w[1].force > w[0].force));
}

/// In the deep-indentation regime (dimensionless depth well past one) the
/// emergent slope factor lies between the measured and cap-theory values.
#[test]
fn stiff_ball_slope_factor_is_in_the_expected_band() {
    let mut state = resting(init_sim(TriMesh::icosphere(0.13, 3), material(5.0e7, 1e-3)).unwrap());
    let series = indent_virtual(&mut state, &indent_config(2.5e-5), 0.025).unwrap();
    let fit = regress_pressure_hat(&series, &RegressionOptions::default()).unwrap();
    let factor = fit.pressure_hat / 1300.0;
    assert!(fit.r2 > 0.95, "r2 {}", fit.r2);
    assert!((0.5..=1.1).contains(&factor), "slope factor {factor}");
}

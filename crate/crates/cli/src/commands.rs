use std::fs;
use std::path::{Path, PathBuf};

use inflato::estimator::{
    calibrate_from_series, estimate_properties, regress_pressure_hat, with_force_noise,
    Calibration, RegressionOptions,
};
use inflato::geometry::{enclosed_volume, fit_curvature, load_mesh, select_patch, TriMesh};
use inflato::measurement::{parse_series, IndentationSeries};
use inflato::shell::{wrinkle_count, ShellOptions, ShellParams, ShellSolver};
use inflato::sim::{indent_virtual, run_scenario, trajectory_csv, SimulationMode, SimulationSetup};
use inflato::{Error, ErrorKind};
use serde_json::json;

use crate::{
    CalibrateArgs, EstimateArgs, MeshInfoArgs, RadiusSource, SimulateArgs, SolveShellArgs,
};

pub const EXIT_IO: u8 = 1;
pub const EXIT_VALIDATION: u8 = 2;
pub const EXIT_NUMERICAL: u8 = 3;

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    fn validation(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_VALIDATION,
            message: message.into(),
        }
    }

    fn io(path: &Path, e: std::io::Error) -> Self {
        Self {
            code: EXIT_IO,
            message: format!("{}: {e}", path.display()),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e.kind() {
            ErrorKind::Io => EXIT_IO,
            ErrorKind::Validation => EXIT_VALIDATION,
            ErrorKind::Numerical => EXIT_NUMERICAL,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

type CliResult<T = ()> = Result<T, CliError>;

fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn write_text(path: &Path, text: &str) -> CliResult {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

fn create_dir(dir: &Path) -> CliResult {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

fn emit(out: Option<&PathBuf>, text: &str) -> CliResult {
    match out {
        Some(p) => write_text(p, text),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn to_json(value: &impl serde::Serialize) -> CliResult<String> {
    serde_json::to_string_pretty(value).map_err(|e| Error::from(e).into())
}

/// Curvature fit on `mesh` around `seed`.
fn fitted_radius(mesh: &TriMesh, seed: usize, patch_radius: Option<f64>) -> CliResult<f64> {
    let hint = patch_radius.unwrap_or_else(|| 4.0 * mesh.mean_edge_length());
    let fit = fit_curvature(&select_patch(mesh, seed, hint)?)?;
    log::info!(
        "curvature fit around vertex {seed}: R = {:.6} m, rms residual {:.3e} m",
        fit.radius,
        fit.rms_residual
    );
    Ok(fit.radius)
}

fn resolve_radius(src: &RadiusSource) -> CliResult<f64> {
    match (src.radius, &src.mesh, src.seed_vertex) {
        (Some(r), _, _) => Ok(r),
        (None, Some(path), Some(seed)) => fitted_radius(&load_mesh(path)?, seed, src.patch_radius),
        _ => Err(CliError::validation(
            "the curvature radius is needed: pass --radius or --mesh with --seed-vertex",
        )),
    }
}

fn load_series(path: &Path, radius: f64, thickness: f64) -> CliResult<IndentationSeries> {
    let series = parse_series(path, radius, thickness)?;
    if let Some(w) = series.unit_warning() {
        eprintln!("warning: {w}");
    }
    Ok(series)
}

pub fn calibrate(args: &CalibrateArgs) -> CliResult {
    if args.series.len() != args.pressure.len() {
        return Err(CliError::validation(format!(
            "{} --series but {} --pressure values; give one pressure per series",
            args.series.len(),
            args.pressure.len()
        )));
    }
    if args.series.len() < 2 {
        return Err(CliError::validation(
            "insufficient data: calibration needs at least 2 (series, pressure) pairs",
        ));
    }
    let radius = resolve_radius(&args.radius)?;
    let series = args
        .series
        .iter()
        .map(|p| load_series(p, radius, args.thickness))
        .collect::<CliResult<Vec<_>>>()?;
    let runs: Vec<(f64, &IndentationSeries)> =
        args.pressure.iter().copied().zip(series.iter()).collect();
    let options = RegressionOptions {
        average_levels: args.average_levels,
    };
    let calibration = calibrate_from_series(&runs, &options)?;

    eprintln!(
        "{:<24} {:>12} {:>14} {:>10}",
        "series", "Pg [Pa]", "Pg_hat [Pa]", "ratio"
    );
    for (s, r) in series.iter().zip(&calibration.records) {
        eprintln!(
            "{:<24} {:>12.2} {:>14.2} {:>10.4}",
            s.object_id(),
            r.measured_pressure,
            r.estimated_pressure_hat,
            r.estimated_pressure_hat / r.measured_pressure
        );
    }
    eprintln!("ks = {:.5}, r2 = {:.4}", calibration.ks, calibration.fit_r2);
    emit(args.out.as_ref(), &calibration.to_json()?)
}

pub fn estimate(args: &EstimateArgs) -> CliResult {
    let Some(wrinkles) = args.wrinkles else {
        return Err(CliError::validation(
            "--wrinkles is required: indent past the onset of wrinkling and count the radial wrinkles around the indenter",
        ));
    };
    let radius = resolve_radius(&args.radius)?;
    let series = load_series(&args.series, radius, args.thickness)?;
    let calibration = Calibration::from_json(&read_text(&args.calibration)?)?;
    let options = RegressionOptions {
        average_levels: args.average_levels,
    };
    let estimate = estimate_properties(&series, &calibration, wrinkles, Some(args.nu), &options)?;
    eprintln!(
        "{}: Pg = {:.2} Pa, E = {:.4e} Pa (R = {radius:.5} m, r2 = {:.4})",
        estimate.object_id, estimate.pressure, estimate.modulus, estimate.diagnostics.r2
    );
    emit(args.out.as_ref(), &estimate.to_json()?)
}

pub fn solve_shell(args: &SolveShellArgs) -> CliResult {
    let params = match (args.pressure, args.tau) {
        (Some(p), _) => ShellParams::new(args.radius, args.thickness, args.modulus, args.nu, p)?,
        (None, Some(t)) => {
            ShellParams::with_tau(args.radius, args.thickness, args.modulus, args.nu, t)?
        }
        (None, None) => return Err(CliError::validation("give --pressure or --tau")),
    };
    if args.w0.is_none() && !args.critical {
        return Err(CliError::validation(
            "nothing to do: pass --W0 and/or --critical",
        ));
    }
    let mut options = if args.full {
        ShellOptions::full()
    } else {
        ShellOptions::membrane()
    };
    if let Some(n) = args.grid_size {
        options.grid_size = n;
    }
    if let Some(r) = args.rho_inf {
        options.rho_inf = r;
    }
    let solver = ShellSolver::new(params, options)?;
    create_dir(&args.out)?;

    let wrinkles = wrinkle_count(&params);
    let mut diagnostics = json!({
        "tau": params.tau(),
        "n_predicted": wrinkles.count,
        "n_unrounded": wrinkles.unrounded,
        "membrane_limit": options.membrane_limit,
        "critical_W0": null,
    });
    if args.critical {
        let c = solver.critical_depth()?;
        eprintln!(
            "critical W0 = {:.4} ({} bisection steps)",
            c.w0, c.iterations
        );
        diagnostics["critical_W0"] = json!(c.w0);
        diagnostics["critical_depth_m"] = json!(params.dimensionless_to_depth(c.w0));
    }
    if let Some(w0) = args.w0 {
        if !(w0.is_finite() && w0 <= 0.0) {
            return Err(CliError::validation(format!("--W0 must be <= 0, got {w0}")));
        }
        let state = solver.continue_to(&solver.flat_state(), w0)?;
        let solution = solver.solution(&state);
        write_text(&args.out.join("profile.csv"), &solution.to_csv_string())?;
        let (w_err, psi_err) = solution.far_field_errors();
        diagnostics["W0"] = json!(w0);
        diagnostics["force"] = json!(solution.force);
        diagnostics["force_N"] = json!(params.dimensionless_to_force(solution.force));
        diagnostics["depth_m"] = json!(params.dimensionless_to_depth(w0));
        diagnostics["annulus"] = json!(solution.annulus.map(|(a, b)| [a, b]));
        diagnostics["stiffness_factor"] = json!(solution.stiffness_factor());
        diagnostics["far_field_error"] = json!({ "W": w_err, "Psi": psi_err });
        diagnostics["newton_residual"] = json!(solution.newton_residual);
        if !solution.satisfies_far_field() {
            eprintln!("warning: far-field conditions are not met; increase --rho-inf");
        }
    }
    write_text(&args.out.join("diagnostics.json"), &to_json(&diagnostics)?)
}

pub fn simulate(args: &SimulateArgs) -> CliResult {
    let setup = SimulationSetup::from_json(&read_text(&args.scenario)?).map_err(|e| {
        let mut err = CliError::from(e);
        err.message = format!("{}: {}", args.scenario.display(), err.message);
        err
    })?;
    let mesh = args.mesh.as_ref().map(load_mesh).transpose()?;
    let mesh = setup.build_mesh(mesh)?;
    let mut state = setup.initial_state(mesh)?;
    create_dir(&args.out)?;

    match setup.mode {
        SimulationMode::Dynamic => {
            let frame_dir = args.out.join("frames");
            if args.obj_frames {
                create_dir(&frame_dir)?;
            }
            let mut index = 0usize;
            let frames = run_scenario(&mut state, &setup.scenario, setup.frame_every, |_, s| {
                if args.obj_frames {
                    let path = frame_dir.join(format!("frame_{index:05}.obj"));
                    s.mesh.save_obj(path)?;
                }
                index += 1;
                Ok(())
            })?;
            write_text(&args.out.join("trajectory.csv"), &trajectory_csv(&frames))?;
            eprintln!("{} frames written to {}", frames.len(), args.out.display());
        }
        SimulationMode::Indent => {
            let target = setup.target_depth.expect("validated");
            let mut series = indent_virtual(&mut state, &setup.scenario, target)?;
            if args.noise > 0.0 {
                series = with_force_noise(&series, args.noise, args.seed)?;
            }
            series.save(args.out.join("series.csv"))?;
            let fit = regress_pressure_hat(&series, &RegressionOptions::default())?;
            let summary = json!({
                "region_radius": series.region_radius(),
                "region_thickness": series.region_thickness(),
                "gauge_pressure": setup.material.initial_pressure,
                "pressure_hat": fit.pressure_hat,
                "ks_sim": fit.pressure_hat / setup.material.initial_pressure,
                "r2": fit.r2,
                "samples": series.len(),
            });
            write_text(&args.out.join("indentation.json"), &to_json(&summary)?)?;
            eprintln!(
                "{} samples, R = {:.5} m, slope/(pi R Pg) = {:.4}, r2 = {:.4}",
                series.len(),
                series.region_radius(),
                fit.pressure_hat / setup.material.initial_pressure,
                fit.r2
            );
        }
    }
    Ok(())
}

pub fn mesh_info(args: &MeshInfoArgs) -> CliResult {
    let mesh = load_mesh(&args.mesh)?;
    let (lo, hi) = mesh.bounds();
    let mut info = json!({
        "vertices": mesh.vertex_count(),
        "faces": mesh.face_count(),
        "watertight": mesh.is_watertight(),
        "surface_area": mesh.surface_area(),
        "mean_edge_length": mesh.mean_edge_length(),
        "bounds": [[lo.x, lo.y, lo.z], [hi.x, hi.y, hi.z]],
    });
    if mesh.is_watertight() {
        let v = enclosed_volume(&mesh)?;
        info["volume"] = json!(v.volume);
        info["outward_oriented"] = json!(v.outward_oriented());
    } else {
        info["boundary_edges"] = json!(mesh.boundary_edges().len());
    }
    if let Some(seed) = args.seed_vertex {
        info["curvature_radius"] = json!(fitted_radius(&mesh, seed, args.patch_radius)?);
    }
    println!("{}", to_json(&info)?);
    Ok(())
}

use nalgebra::{Matrix3, Matrix4, Vector4};

use super::mesh::{bounds_of, Point3};
use super::patch::SurfacePatch;
use crate::error::{Error, Result};

/// RMS residual / radius above which a patch is not considered uniformly curved.
pub const NON_UNIFORM_RATIO: f64 = 0.05;

/// Coplanarity tolerance relative to the bounding-box diagonal.
pub const COPLANAR_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureFit {
    pub center: Point3,
    pub radius: f64,
    /// RMS orthogonal distance of the points from the fitted sphere.
    pub rms_residual: f64,
}

impl CurvatureFit {
    pub fn non_uniform(&self) -> bool {
        self.rms_residual / self.radius > NON_UNIFORM_RATIO
    }
}

/// Fits a sphere to the patch vertices: algebraic least squares on
/// `|x|^2 = 2 c.x + k`, then a single Gauss-Newton step on the orthogonal
/// distances.
pub fn fit_curvature(patch: &SurfacePatch<'_>) -> Result<CurvatureFit> {
    let points: Vec<Point3> = patch.points().copied().collect();
    let fit = fit_sphere(&points)?;
    if fit.non_uniform() {
        log::warn!(
            "patch around vertex {}: rms residual {:.3e} m is {:.1}% of the fitted radius; curvature is not uniform",
            patch.seed,
            fit.rms_residual,
            100.0 * fit.rms_residual / fit.radius
        );
    }
    Ok(fit)
}

pub fn fit_sphere(points: &[Point3]) -> Result<CurvatureFit> {
    if points.len() < 4 {
        return Err(Error::DegenerateFit(format!(
            "{} points cannot determine a sphere",
            points.len()
        )));
    }
    let (lo, hi) = bounds_of(points.iter());
    let diag = (hi - lo).norm();
    let n = points.len() as f64;
    let mean = points.iter().fold(Point3::zeros(), |a, p| a + p) / n;

    // Work in coordinates centred on the mean and scaled to unit extent.
    let q: Vec<Point3> = points.iter().map(|p| (p - mean) / diag).collect();
    let cov = q
        .iter()
        .fold(Matrix3::zeros(), |a, v| a + v * v.transpose())
        / n;
    let min_eig = cov.symmetric_eigenvalues().min().max(0.0);
    if diag == 0.0 || min_eig.sqrt() < COPLANAR_TOL {
        return Err(Error::DegenerateFit(
            "points are coplanar within tolerance".into(),
        ));
    }

    let mut ata = Matrix4::zeros();
    let mut atb = Vector4::zeros();
    for v in &q {
        let row = Vector4::new(2.0 * v.x, 2.0 * v.y, 2.0 * v.z, 1.0);
        ata += row * row.transpose();
        atb += row * v.norm_squared();
    }
    let sol = ata
        .cholesky()
        .ok_or_else(|| Error::DegenerateFit("algebraic normal equations are singular".into()))?
        .solve(&atb);
    let mut c = Point3::new(sol[0], sol[1], sol[2]);
    let r2 = sol[3] + c.norm_squared();
    if r2.is_nan() || r2 <= 0.0 {
        return Err(Error::DegenerateFit(
            "algebraic fit has no real radius".into(),
        ));
    }
    let mut r = r2.sqrt();

    // Geometric refinement.
    let mut jtj = Matrix4::zeros();
    let mut jtr = Vector4::zeros();
    for v in &q {
        let d = v - c;
        let dist = d.norm();
        if dist == 0.0 {
            continue;
        }
        let u = d / dist;
        let row = Vector4::new(-u.x, -u.y, -u.z, -1.0);
        let res = dist - r;
        jtj += row * row.transpose();
        jtr += row * res;
    }
    if let Some(chol) = jtj.cholesky() {
        let step = chol.solve(&(-jtr));
        if step.iter().all(|s| s.is_finite()) {
            c += Point3::new(step[0], step[1], step[2]);
            r += step[3];
        }
    }

    let rms = (q.iter().map(|v| ((v - c).norm() - r).powi(2)).sum::<f64>() / n).sqrt();
    Ok(CurvatureFit {
        center: mean + c * diag,
        radius: r.abs() * diag,
        rms_residual: rms * diag,
    })
}

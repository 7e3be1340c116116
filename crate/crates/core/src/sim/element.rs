//! Constant-strain triangle with a compressible Neo-Hookean membrane law
//! and a constant second Piola-Kirchhoff prestress.

use nalgebra::{Matrix2, Matrix3x2};

use super::material::MaterialSpec;
use crate::geometry::Point3;

/// Smallest admissible ratio of current to rest area.
pub const MIN_AREA_RATIO: f64 = 1e-2;

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct RestElement {
    pub vertices: [usize; 3],
    /// Inverse of the rest edge matrix in an orthonormal in-plane frame.
    pub dm_inv: Matrix2<f64>,
    pub area: f64,
    /// Deformation gradient at rest: the in-plane frame vectors.
    pub frame: Matrix3x2<f64>,
}

impl RestElement {
    /// `None` for a degenerate rest triangle.
    pub fn new(vertices: [usize; 3], p: [Point3; 3]) -> Option<Self> {
        let e1 = p[1] - p[0];
        let e2 = p[2] - p[0];
        let normal = e1.cross(&e2);
        let len = e1.norm();
        if normal.norm() <= 1e-14 * len * len || len == 0.0 {
            return None;
        }
        let t1 = e1 / len;
        let t2 = normal.normalize().cross(&t1);
        let dm = Matrix2::new(len, e2.dot(&t1), 0.0, e2.dot(&t2));
        let dm_inv = dm.try_inverse()?;
        Some(Self {
            vertices,
            dm_inv,
            area: 0.5 * dm.determinant().abs(),
            frame: Matrix3x2::from_columns(&[t1, t2]),
        })
    }

    fn edges(&self, x: &[Point3]) -> Matrix3x2<f64> {
        let [a, b, c] = self.vertices;
        Matrix3x2::from_columns(&[x[b] - x[a], x[c] - x[a]])
    }

    /// Adds forces to `out`. Returns the area ratio, or `Err(ratio)` when
    /// the element is degenerate or not finite.
    pub fn add_forces(
        &self,
        x: &[Point3],
        material: &MaterialSpec,
        prestress: &Matrix2<f64>,
        out: &mut [Point3],
    ) -> Result<f64, f64> {
        let f = self.edges(x) * self.dm_inv;
        let c = f.transpose() * f;
        let det = c.determinant();
        let j = det.max(0.0).sqrt();
        if j.is_nan() || j < MIN_AREA_RATIO {
            return Err(j);
        }
        let c_inv = Matrix2::new(c[(1, 1)], -c[(0, 1)], -c[(1, 0)], c[(0, 0)]) / det;
        let (mu, lambda) = (material.shear_stiffness(), material.lame_stiffness());
        let s = (Matrix2::identity() - c_inv) * mu + c_inv * (lambda * j.ln()) + prestress;
        self.scatter(f * s, out);
        Ok(j)
    }

    /// Forces from a first Piola-Kirchhoff stress `p`.
    fn scatter(&self, p: Matrix3x2<f64>, out: &mut [Point3]) {
        let h = p * self.dm_inv.transpose() * (-self.area);
        let f1: Point3 = h.column(0).into();
        let f2: Point3 = h.column(1).into();
        let [a, b, c] = self.vertices;
        out[a] -= f1 + f2;
        out[b] += f1;
        out[c] += f2;
    }

    /// Strain energy including the prestress work.
    pub fn energy(&self, x: &[Point3], material: &MaterialSpec, prestress: &Matrix2<f64>) -> f64 {
        let f = self.edges(x) * self.dm_inv;
        let c = f.transpose() * f;
        let ln_j = 0.5 * c.determinant().ln();
        let (mu, lambda) = (material.shear_stiffness(), material.lame_stiffness());
        let green = (c - Matrix2::identity()) * 0.5;
        let hyper = 0.5 * mu * (c.trace() - 2.0) - mu * ln_j + 0.5 * lambda * ln_j * ln_j;
        self.area * (hyper + prestress.component_mul(&green).sum())
    }

    /// Rest-state forces of a prestress `(s11, s12, s22)`.
    pub fn prestress_forces(&self, s: [f64; 3], out: &mut [Point3]) {
        let stress = Matrix2::new(s[0], s[1], s[1], s[2]);
        self.scatter(self.frame * stress, out);
    }

    /// Adjoint of [`Self::prestress_forces`].
    pub fn prestress_adjoint(&self, g: &[Point3]) -> [f64; 3] {
        let [a, b, c] = self.vertices;
        let gm = Matrix3x2::from_columns(&[g[b] - g[a], g[c] - g[a]]);
        let m = self.dm_inv.transpose() * gm.transpose() * self.frame * (-self.area);
        [m[(0, 0)], m[(0, 1)] + m[(1, 0)], m[(1, 1)]]
    }
}

//! Prestress that holds the inflated reference shape in equilibrium.
//!
//! The digitized shape is already inflated, so the membrane must carry a
//! stress that balances the gas pressure at rest. One symmetric in-plane
//! stress per face is found by least squares: start from the best uniform
//! isotropic tension, then add the minimum-norm correction by CGLS.

use nalgebra::Matrix2;

use super::element::RestElement;
use crate::geometry::Point3;

const MAX_ITERATIONS: usize = 20_000;
const RELATIVE_TOL: f64 = 1e-13;

pub(crate) struct Prestress {
    pub stresses: Vec<Matrix2<f64>>,
    /// `|A s - b| / |b|` at exit.
    pub relative_residual: f64,
    pub iterations: usize,
}

fn apply(elements: &[RestElement], s: &[[f64; 3]], n: usize) -> Vec<Point3> {
    let mut out = vec![Point3::zeros(); n];
    for (e, si) in elements.iter().zip(s) {
        e.prestress_forces(*si, &mut out);
    }
    out
}

fn apply_adjoint(elements: &[RestElement], g: &[Point3]) -> Vec<[f64; 3]> {
    elements.iter().map(|e| e.prestress_adjoint(g)).collect()
}

fn dot_v(a: &[Point3], b: &[Point3]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.dot(y)).sum()
}

fn dot_s(a: &[[f64; 3]], b: &[[f64; 3]]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| x[0] * y[0] + x[1] * y[1] + x[2] * y[2])
        .sum()
}

/// Per-face stresses whose rest-state forces equal `target`.
pub(crate) fn solve_prestress(elements: &[RestElement], target: &[Point3]) -> Prestress {
    let n = target.len();
    let b_norm = dot_v(target, target).sqrt();
    let mut s: Vec<[f64; 3]> = vec![[1.0, 0.0, 1.0]; elements.len()];
    if b_norm == 0.0 {
        return Prestress {
            stresses: vec![Matrix2::zeros(); elements.len()],
            relative_residual: 0.0,
            iterations: 0,
        };
    }
    let unit = apply(elements, &s, n);
    let tension = dot_v(&unit, target) / dot_v(&unit, &unit).max(f64::MIN_POSITIVE);
    s.fill([tension, 0.0, tension]);

    let mut r: Vec<Point3> = apply(elements, &s, n)
        .iter()
        .zip(target)
        .map(|(a, b)| b - a)
        .collect();
    let mut z = apply_adjoint(elements, &r);
    let mut p = z.clone();
    let mut gamma = dot_s(&z, &z);
    let mut iterations = 0;
    while iterations < MAX_ITERATIONS && dot_v(&r, &r).sqrt() > RELATIVE_TOL * b_norm {
        let q = apply(elements, &p, n);
        let qq = dot_v(&q, &q);
        if qq == 0.0 {
            break;
        }
        let alpha = gamma / qq;
        for (si, pi) in s.iter_mut().zip(&p) {
            for k in 0..3 {
                si[k] += alpha * pi[k];
            }
        }
        for (ri, qi) in r.iter_mut().zip(&q) {
            *ri -= alpha * qi;
        }
        z = apply_adjoint(elements, &r);
        let next = dot_s(&z, &z);
        let beta = next / gamma;
        gamma = next;
        for (pi, zi) in p.iter_mut().zip(&z) {
            for k in 0..3 {
                pi[k] = zi[k] + beta * pi[k];
            }
        }
        iterations += 1;
    }
    let achieved = apply(elements, &s, n);
    let residual: f64 = achieved
        .iter()
        .zip(target)
        .map(|(a, b)| (a - b).norm_squared())
        .sum();
    Prestress {
        stresses: s
            .iter()
            .map(|si| Matrix2::new(si[0], si[1], si[1], si[2]))
            .collect(),
        relative_residual: residual.sqrt() / b_norm,
        iterations,
    }
}

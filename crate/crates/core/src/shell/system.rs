//! First-order forms of the axisymmetric pressurized shallow-shell equations
//! after one radial integration.
//!
//! With `P = rho Psi'`, the compatibility equation becomes
//! `P' = rho W' - W'^2 / 2 + Psi / rho`, and the vertical force balance reads
//! `tau^-2 rho d/drho(lap W) + rho Psi - Psi W' = rho^2 / 2 - Fh`, where
//! `Fh = F / (2 pi P_g l_p^2)` is the unknown load parameter. In the
//! membrane limit the bending term is dropped and `W'` follows
//! algebraically from the force balance.
//!
//! The far field is matched to the outer asymptote `Psi ~ rho/2 - Fh/rho`,
//! `W ~ 0`, which the linearised equations admit exactly.

use super::bvp::OdeSystem;

pub(crate) const PSI: usize = 0;
pub(crate) const P: usize = 1;
pub(crate) const W: usize = 2;

/// Membrane limit. State `[Psi, P, W, Fh]`.
pub(crate) struct MembraneSystem {
    pub nu: f64,
    pub w0: f64,
}

impl MembraneSystem {
    pub const DIM: usize = 4;
    pub const FORCE: usize = 3;

    #[inline]
    fn slope(rho: f64, psi: f64, fh: f64) -> f64 {
        rho - (0.5 * rho * rho - fh) / psi
    }
}

impl OdeSystem for MembraneSystem {
    fn dim(&self) -> usize {
        Self::DIM
    }

    fn n_left(&self) -> usize {
        2
    }

    fn rhs(&self, rho: f64, y: &[f64], out: &mut [f64]) {
        let (psi, p, fh) = (y[PSI], y[P], y[Self::FORCE]);
        let phi = Self::slope(rho, psi, fh);
        out[PSI] = p / rho;
        out[P] = rho * phi - 0.5 * phi * phi + psi / rho;
        out[W] = phi;
        out[Self::FORCE] = 0.0;
    }

    fn jacobian(&self, rho: f64, y: &[f64], out: &mut [f64]) {
        let n = Self::DIM;
        let (psi, fh) = (y[PSI], y[Self::FORCE]);
        let phi = Self::slope(rho, psi, fh);
        let dphi_dpsi = (0.5 * rho * rho - fh) / (psi * psi);
        let dphi_df = 1.0 / psi;
        out.fill(0.0);
        out[PSI * n + P] = 1.0 / rho;
        out[P * n + PSI] = (rho - phi) * dphi_dpsi + 1.0 / rho;
        out[P * n + Self::FORCE] = (rho - phi) * dphi_df;
        out[W * n + PSI] = dphi_dpsi;
        out[W * n + Self::FORCE] = dphi_df;
    }

    fn left_bc(&self, _rho: f64, y: &[f64], out: &mut [f64]) {
        out[0] = y[W] - self.w0;
        out[1] = y[P] - self.nu * y[PSI];
    }

    fn right_bc(&self, rho: f64, y: &[f64], out: &mut [f64]) {
        out[0] = y[W];
        out[1] = y[PSI] - (0.5 * rho - y[Self::FORCE] / rho);
    }

    fn left_bc_jacobian(&self, _rho: f64, _y: &[f64], out: &mut [f64]) {
        let n = Self::DIM;
        out[..2 * n].fill(0.0);
        out[W] = 1.0;
        out[n + P] = 1.0;
        out[n + PSI] = -self.nu;
    }

    fn right_bc_jacobian(&self, rho: f64, _y: &[f64], out: &mut [f64]) {
        let n = Self::DIM;
        out[..2 * n].fill(0.0);
        out[W] = 1.0;
        out[n + PSI] = 1.0;
        out[n + Self::FORCE] = 1.0 / rho;
    }
}

/// Shell with the bending term retained and a clamped slope at the load
/// point. State `[Psi, P, W, phi, M, Fh]` with `phi = W'` and the scaled
/// moment `M = rho phi' / tau^2`, which keeps every row of order one for
/// large `tau`.
pub(crate) struct FullSystem {
    pub nu: f64,
    pub w0: f64,
    pub tau: f64,
}

impl FullSystem {
    pub const DIM: usize = 6;
    pub const PHI: usize = 3;
    pub const M: usize = 4;
    pub const FORCE: usize = 5;
}

impl OdeSystem for FullSystem {
    fn dim(&self) -> usize {
        Self::DIM
    }

    fn n_left(&self) -> usize {
        3
    }

    fn rhs(&self, rho: f64, y: &[f64], out: &mut [f64]) {
        let (psi, p, phi, m, fh) = (y[PSI], y[P], y[Self::PHI], y[Self::M], y[Self::FORCE]);
        let t2 = self.tau * self.tau;
        out[PSI] = p / rho;
        out[P] = rho * phi - 0.5 * phi * phi + psi / rho;
        out[W] = phi;
        out[Self::PHI] = t2 * m / rho;
        out[Self::M] = 0.5 * rho * rho - fh - rho * psi + psi * phi + phi / (t2 * rho);
        out[Self::FORCE] = 0.0;
    }

    fn jacobian(&self, rho: f64, y: &[f64], out: &mut [f64]) {
        let n = Self::DIM;
        let (psi, phi) = (y[PSI], y[Self::PHI]);
        let t2 = self.tau * self.tau;
        out.fill(0.0);
        out[PSI * n + P] = 1.0 / rho;
        out[P * n + PSI] = 1.0 / rho;
        out[P * n + Self::PHI] = rho - phi;
        out[W * n + Self::PHI] = 1.0;
        out[Self::PHI * n + Self::M] = t2 / rho;
        out[Self::M * n + PSI] = phi - rho;
        out[Self::M * n + Self::PHI] = psi + 1.0 / (t2 * rho);
        out[Self::M * n + Self::FORCE] = -1.0;
    }

    fn left_bc(&self, _rho: f64, y: &[f64], out: &mut [f64]) {
        out[0] = y[W] - self.w0;
        out[1] = y[P] - self.nu * y[PSI];
        out[2] = y[Self::PHI];
    }

    fn right_bc(&self, rho: f64, y: &[f64], out: &mut [f64]) {
        out[0] = y[W];
        out[1] = y[PSI] - (0.5 * rho - y[Self::FORCE] / rho);
        out[2] = y[Self::PHI];
    }
}

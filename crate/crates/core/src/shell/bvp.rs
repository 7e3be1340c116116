//! Two-point boundary-value problems `y' = f(x, y)` discretised by
//! trapezoidal collocation on an arbitrary ascending grid and solved with a
//! damped Newton iteration on the banded global Jacobian.
//!
//! Unknown scalar parameters are carried as extra states with zero
//! derivative, which keeps the Jacobian banded.

use super::banded::BandMatrix;

pub trait OdeSystem {
    /// Number of states, including parameters carried as constant states.
    fn dim(&self) -> usize;

    /// Number of boundary conditions imposed at the left end; the remaining
    /// `dim() - n_left()` are imposed at the right end.
    fn n_left(&self) -> usize;

    fn rhs(&self, x: f64, y: &[f64], out: &mut [f64]);

    /// Row-major `dim x dim` Jacobian of `rhs`. Defaults to forward differences.
    fn jacobian(&self, x: f64, y: &[f64], out: &mut [f64]) {
        fd_jacobian(|yy, o| self.rhs(x, yy, o), y, self.dim(), out);
    }

    fn left_bc(&self, x: f64, y: &[f64], out: &mut [f64]);

    fn right_bc(&self, x: f64, y: &[f64], out: &mut [f64]);

    /// Row-major `n_left x dim` Jacobian of `left_bc`.
    fn left_bc_jacobian(&self, x: f64, y: &[f64], out: &mut [f64]) {
        fd_jacobian(|yy, o| self.left_bc(x, yy, o), y, self.n_left(), out);
    }

    /// Row-major `(dim - n_left) x dim` Jacobian of `right_bc`.
    fn right_bc_jacobian(&self, x: f64, y: &[f64], out: &mut [f64]) {
        fd_jacobian(
            |yy, o| self.right_bc(x, yy, o),
            y,
            self.dim() - self.n_left(),
            out,
        );
    }
}

/// Forward-difference Jacobian of `f: R^n -> R^m`, written row-major into `out`.
pub fn fd_jacobian(mut f: impl FnMut(&[f64], &mut [f64]), y: &[f64], m: usize, out: &mut [f64]) {
    let n = y.len();
    let mut base = vec![0.0; m];
    let mut pert = vec![0.0; m];
    f(y, &mut base);
    let mut yy = y.to_vec();
    for j in 0..n {
        let h = 1e-7 * y[j].abs().max(1.0);
        yy[j] = y[j] + h;
        f(&yy, &mut pert);
        for i in 0..m {
            out[i * n + j] = (pert[i] - base[i]) / h;
        }
        yy[j] = y[j];
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonSettings {
    /// Convergence threshold on the max-norm of the discrete residual.
    pub tol: f64,
    pub max_iter: usize,
    /// Smallest damping factor tried before giving up.
    pub min_damping: f64,
}

impl Default for NewtonSettings {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iter: 60,
            min_damping: 1.0 / 4096.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonReport {
    pub iterations: usize,
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NewtonFailure {
    Singular { iteration: usize },
    Stalled { iteration: usize, residual: f64 },
    MaxIterations { residual: f64 },
}

/// Trapezoidal collocation of an [`OdeSystem`] on a fixed grid. States are
/// stored node-major: `y[i * dim + k]`.
pub struct Collocation<'a, S: OdeSystem> {
    pub system: &'a S,
    pub grid: &'a [f64],
}

impl<'a, S: OdeSystem> Collocation<'a, S> {
    pub fn new(system: &'a S, grid: &'a [f64]) -> Self {
        assert!(grid.len() >= 2, "collocation grid needs two nodes");
        assert!(grid.windows(2).all(|w| w[1] > w[0]), "grid must increase");
        Self { system, grid }
    }

    fn n(&self) -> usize {
        self.system.dim()
    }

    pub fn unknowns(&self) -> usize {
        self.n() * self.grid.len()
    }

    /// Residual vector: left BCs, one block per interval, right BCs.
    pub fn residual(&self, y: &[f64], out: &mut [f64]) {
        let n = self.n();
        let nl = self.system.n_left();
        let nodes = self.grid.len();
        let mut f0 = vec![0.0; n];
        let mut f1 = vec![0.0; n];
        self.system.left_bc(self.grid[0], &y[..n], &mut out[..nl]);
        self.system.rhs(self.grid[0], &y[..n], &mut f0);
        for i in 0..nodes - 1 {
            let h = self.grid[i + 1] - self.grid[i];
            let (ya, yb) = (&y[i * n..(i + 1) * n], &y[(i + 1) * n..(i + 2) * n]);
            self.system.rhs(self.grid[i + 1], yb, &mut f1);
            let row = nl + i * n;
            for k in 0..n {
                out[row + k] = yb[k] - ya[k] - 0.5 * h * (f0[k] + f1[k]);
            }
            std::mem::swap(&mut f0, &mut f1);
        }
        let last = (nodes - 1) * n;
        self.system.right_bc(
            self.grid[nodes - 1],
            &y[last..last + n],
            &mut out[nl + (nodes - 1) * n..],
        );
    }

    fn jacobian(&self, y: &[f64]) -> BandMatrix {
        let n = self.n();
        let nl = self.system.n_left();
        let nr = n - nl;
        let nodes = self.grid.len();
        let kl = nl + n - 1;
        let ku = (2 * n - 1 - nl).max(n - 1);
        let mut jac = BandMatrix::zeros(self.unknowns(), kl, ku);

        let mut bc = vec![0.0; n * n];
        self.system
            .left_bc_jacobian(self.grid[0], &y[..n], &mut bc[..nl * n]);
        for r in 0..nl {
            for c in 0..n {
                jac.add(r, c, bc[r * n + c]);
            }
        }

        let mut ja = vec![0.0; n * n];
        let mut jb = vec![0.0; n * n];
        self.system.jacobian(self.grid[0], &y[..n], &mut ja);
        for i in 0..nodes - 1 {
            let h = self.grid[i + 1] - self.grid[i];
            self.system
                .jacobian(self.grid[i + 1], &y[(i + 1) * n..(i + 2) * n], &mut jb);
            let row = nl + i * n;
            for r in 0..n {
                for c in 0..n {
                    let delta = if r == c { 1.0 } else { 0.0 };
                    jac.add(row + r, i * n + c, -delta - 0.5 * h * ja[r * n + c]);
                    jac.add(row + r, (i + 1) * n + c, delta - 0.5 * h * jb[r * n + c]);
                }
            }
            std::mem::swap(&mut ja, &mut jb);
        }

        let last = (nodes - 1) * n;
        self.system
            .right_bc_jacobian(self.grid[nodes - 1], &y[last..last + n], &mut bc[..nr * n]);
        for r in 0..nr {
            for c in 0..n {
                jac.add(nl + (nodes - 1) * n + r, last + c, bc[r * n + c]);
            }
        }
        jac
    }

    /// Damped Newton iteration from `y`, which is updated in place.
    pub fn solve(
        &self,
        y: &mut Vec<f64>,
        settings: &NewtonSettings,
    ) -> Result<NewtonReport, NewtonFailure> {
        let m = self.unknowns();
        assert_eq!(y.len(), m);
        let mut res = vec![0.0; m];
        let mut trial_res = vec![0.0; m];
        let mut trial = vec![0.0; m];
        self.residual(y, &mut res);
        let mut norm2 = l2(&res);
        for iteration in 0..settings.max_iter {
            let max_res = linf(&res);
            if max_res < settings.tol {
                return Ok(NewtonReport {
                    iterations: iteration,
                    residual: max_res,
                });
            }
            let lu = self
                .jacobian(y)
                .factor()
                .ok_or(NewtonFailure::Singular { iteration })?;
            let mut step: Vec<f64> = res.iter().map(|r| -r).collect();
            lu.solve_in_place(&mut step);
            let mut lambda = 1.0;
            loop {
                for k in 0..m {
                    trial[k] = y[k] + lambda * step[k];
                }
                self.residual(&trial, &mut trial_res);
                let tn = l2(&trial_res);
                if tn.is_finite() && tn < (1.0 - 1e-4 * lambda) * norm2 {
                    break;
                }
                lambda *= 0.5;
                if lambda < settings.min_damping {
                    return Err(NewtonFailure::Stalled {
                        iteration,
                        residual: max_res,
                    });
                }
            }
            std::mem::swap(y, &mut trial);
            std::mem::swap(&mut res, &mut trial_res);
            norm2 = l2(&res);
        }
        let max_res = linf(&res);
        if max_res < settings.tol {
            Ok(NewtonReport {
                iterations: settings.max_iter,
                residual: max_res,
            })
        } else {
            Err(NewtonFailure::MaxIterations { residual: max_res })
        }
    }
}

fn l2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn linf(v: &[f64]) -> f64 {
    v.iter().fold(
        0.0,
        |a, x| if x.is_nan() { f64::NAN } else { a.max(x.abs()) },
    )
}

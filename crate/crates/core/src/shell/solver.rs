use std::fmt::Write as _;

use log::{debug, warn};
use serde::Serialize;

use super::bvp::{Collocation, NewtonFailure, NewtonSettings, OdeSystem};
use super::params::ShellParams;
use super::system::{FullSystem, MembraneSystem, P, PSI, W};
use crate::error::{ensure, Error, Result};

pub const MIN_GRID_SIZE: usize = 200;
pub const MIN_RHO_INF: f64 = 20.0;
pub const DEFAULT_RHO_INF: f64 = 60.0;
pub const DEFAULT_GRID_SIZE: usize = 1600;
/// Largest continuation step in `|W0|`.
pub const MAX_CONTINUATION_STEP: f64 = 0.25;
const MIN_CONTINUATION_STEP: f64 = 1e-3;
/// Inner radius as a fraction of the outer one when not given explicitly.
pub const DEFAULT_INNER_FRACTION: f64 = 1e-6;
pub const CRITICAL_DEPTH_TOL: f64 = 1e-3;
/// Deepest indentation explored when searching for the onset of compression.
const CRITICAL_SEARCH_LIMIT: f64 = -8.0;
/// Length scale (in rho) of the transition from logarithmic to uniform spacing.
const GRID_TRANSITION: f64 = 3.0;
const MIN_BENDABILITY: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShellOptions {
    /// Drop the bending term.
    pub membrane_limit: bool,
    pub grid_size: usize,
    pub rho_inf: f64,
    /// Inner boundary radius; defaults to `DEFAULT_INNER_FRACTION * rho_inf`.
    pub inner_radius: Option<f64>,
    pub newton: NewtonSettings,
}

impl Default for ShellOptions {
    fn default() -> Self {
        Self {
            membrane_limit: true,
            grid_size: DEFAULT_GRID_SIZE,
            rho_inf: DEFAULT_RHO_INF,
            inner_radius: None,
            newton: NewtonSettings::default(),
        }
    }
}

impl ShellOptions {
    pub fn membrane() -> Self {
        Self::default()
    }

    pub fn full() -> Self {
        Self {
            membrane_limit: false,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        ensure(self.grid_size >= MIN_GRID_SIZE, || {
            format!(
                "grid_size must be at least {MIN_GRID_SIZE}, got {}",
                self.grid_size
            )
        })?;
        ensure(
            self.rho_inf.is_finite() && self.rho_inf >= MIN_RHO_INF,
            || {
                format!(
                    "rho_inf must be at least {MIN_RHO_INF}, got {}",
                    self.rho_inf
                )
            },
        )?;
        let inner = self.inner_radius();
        ensure(
            inner.is_finite() && inner > 0.0 && inner < 0.01 * self.rho_inf,
            || format!("inner radius {inner} must lie in (0, rho_inf / 100)"),
        )
    }

    pub fn inner_radius(&self) -> f64 {
        self.inner_radius
            .unwrap_or(DEFAULT_INNER_FRACTION * self.rho_inf)
    }
}

/// Grid on `[inner, outer]`, uniform in `ln(rho) + rho / GRID_TRANSITION`:
/// logarithmic near the load point and uniform in the far field.
pub fn shell_grid(inner: f64, outer: f64, size: usize) -> Vec<f64> {
    let stretch = |rho: f64| rho.ln() + rho / GRID_TRANSITION;
    let (a, b) = (stretch(inner), stretch(outer));
    let mut grid = Vec::with_capacity(size);
    for i in 0..size {
        let target = a + (b - a) * i as f64 / (size - 1) as f64;
        // The stretch is increasing in s = ln(rho); bisect on s.
        let (mut lo, mut hi) = (inner.ln() - 1.0, outer.ln() + 1.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid + mid.exp() / GRID_TRANSITION < target {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < 1e-15 * (1.0 + mid.abs()) {
                break;
            }
        }
        grid.push((0.5 * (lo + hi)).exp());
    }
    grid[0] = inner;
    grid[size - 1] = outer;
    grid
}

/// Converged axisymmetric shell state.
#[derive(Debug, Clone, Serialize)]
pub struct ShellSolution {
    pub rho: Vec<f64>,
    pub w: Vec<f64>,
    pub psi: Vec<f64>,
    /// `Psi'`.
    pub hoop_stress: Vec<f64>,
    /// `Psi / rho`.
    pub radial_stress: Vec<f64>,
    pub w0: f64,
    /// Point force in units of `P_g l_p^2`.
    pub force: f64,
    /// Interval where the hoop stress is compressive.
    pub annulus: Option<(f64, f64)>,
    pub membrane_limit: bool,
    pub newton_residual: f64,
}

impl ShellSolution {
    pub fn rho_inf(&self) -> f64 {
        *self.rho.last().expect("non-empty grid")
    }

    /// `(|W(rho_inf)|, |Psi(rho_inf) - rho_inf / 2|)`.
    pub fn far_field_errors(&self) -> (f64, f64) {
        let r = self.rho_inf();
        (
            self.w.last().copied().unwrap_or(0.0).abs(),
            (self.psi.last().copied().unwrap_or(0.0) - 0.5 * r).abs(),
        )
    }

    pub fn satisfies_far_field(&self) -> bool {
        let (w_err, psi_err) = self.far_field_errors();
        w_err < 1e-4 && psi_err < 1e-3 * self.rho_inf()
    }

    pub fn min_hoop_stress(&self) -> f64 {
        self.hoop_stress
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    /// Effective scaling factor `force / (pi |W0|)` of the linear law.
    pub fn stiffness_factor(&self) -> Option<f64> {
        (self.w0 < 0.0).then(|| self.force / (std::f64::consts::PI * self.w0.abs()))
    }

    /// Linear interpolation of `W` at `rho`, clamped to the grid.
    pub fn w_at(&self, rho: f64) -> f64 {
        interpolate(&self.rho, &self.w, rho)
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("rho,W,Psi,hoop_stress,radial_stress\n");
        for i in 0..self.rho.len() {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                self.rho[i], self.w[i], self.psi[i], self.hoop_stress[i], self.radial_stress[i]
            );
        }
        out
    }
}

pub(crate) fn interpolate(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    if x <= xs[0] {
        return ys[0];
    }
    let last = xs.len() - 1;
    if x >= xs[last] {
        return ys[last];
    }
    let k = xs.partition_point(|&v| v <= x);
    let t = (x - xs[k - 1]) / (xs[k] - xs[k - 1]);
    ys[k - 1] + t * (ys[k] - ys[k - 1])
}

fn compressive_interval(rho: &[f64], hoop: &[f64]) -> Option<(f64, f64)> {
    let first = hoop.iter().position(|&s| s < 0.0)?;
    let mut last = first;
    while last + 1 < hoop.len() && hoop[last + 1] < 0.0 {
        last += 1;
    }
    let crossing = |i: usize, j: usize| {
        let t = hoop[i] / (hoop[i] - hoop[j]);
        rho[i] + t * (rho[j] - rho[i])
    };
    let lo = if first == 0 {
        rho[0]
    } else {
        crossing(first - 1, first)
    };
    let hi = if last + 1 == hoop.len() {
        rho[last]
    } else {
        crossing(last, last + 1)
    };
    Some((lo, hi))
}

/// Discretised shell problem on a fixed grid, reusable across depths.
pub struct ShellSolver {
    params: ShellParams,
    options: ShellOptions,
    grid: Vec<f64>,
}

/// Converged nodal state at a given depth, used to warm-start neighbours.
#[derive(Debug, Clone)]
pub struct ShellState {
    pub w0: f64,
    y: Vec<f64>,
}

enum Model {
    Membrane(MembraneSystem),
    Full(FullSystem),
}

impl ShellSolver {
    pub fn new(params: ShellParams, options: ShellOptions) -> Result<Self> {
        params.validate()?;
        options.validate()?;
        let grid = shell_grid(options.inner_radius(), options.rho_inf, options.grid_size);
        Ok(Self {
            params,
            options,
            grid,
        })
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    fn dim(&self) -> usize {
        if self.options.membrane_limit {
            MembraneSystem::DIM
        } else {
            FullSystem::DIM
        }
    }

    fn force_index(&self) -> usize {
        self.dim() - 1
    }

    fn model(&self, w0: f64) -> Model {
        if self.options.membrane_limit {
            Model::Membrane(MembraneSystem {
                nu: self.params.nu,
                w0,
            })
        } else {
            Model::Full(FullSystem {
                nu: self.params.nu,
                w0,
                tau: self.params.tau(),
            })
        }
    }

    /// Unindented state: `W = 0`, `Psi = rho / 2`.
    pub fn flat_state(&self) -> ShellState {
        let n = self.dim();
        let mut y = vec![0.0; n * self.grid.len()];
        for (i, &r) in self.grid.iter().enumerate() {
            y[i * n + PSI] = 0.5 * r;
            y[i * n + P] = 0.5 * r;
        }
        ShellState { w0: 0.0, y }
    }

    fn newton(&self, w0: f64, y: &mut Vec<f64>) -> std::result::Result<f64, NewtonFailure> {
        fn run<S: OdeSystem>(
            s: &S,
            grid: &[f64],
            y: &mut Vec<f64>,
            settings: &NewtonSettings,
        ) -> std::result::Result<f64, NewtonFailure> {
            Collocation::new(s, grid)
                .solve(y, settings)
                .map(|r| r.residual)
        }
        match self.model(w0) {
            Model::Membrane(s) => run(&s, &self.grid, y, &self.options.newton),
            Model::Full(s) => run(&s, &self.grid, y, &self.options.newton),
        }
    }

    /// Continues from `start` to `target` in steps of at most
    /// [`MAX_CONTINUATION_STEP`], halving the step on Newton failure.
    pub fn continue_to(&self, start: &ShellState, target: f64) -> Result<ShellState> {
        ensure(target.is_finite() && target <= 0.0, || {
            format!("indentation depth W0 must be <= 0, got {target}")
        })?;
        let mut current = start.clone();
        let mut previous: Option<ShellState> = None;
        let mut step = MAX_CONTINUATION_STEP;
        while current.w0 != target {
            let gap = target - current.w0;
            let next = if gap.abs() <= step {
                target
            } else {
                current.w0 + step * gap.signum()
            };
            // Secant predictor once two states are known.
            let mut guess = current.y.clone();
            if let Some(prev) = &previous {
                let span = current.w0 - prev.w0;
                if span.abs() > 0.0 {
                    let t = (next - current.w0) / span;
                    for (g, (c, p)) in guess.iter_mut().zip(current.y.iter().zip(&prev.y)) {
                        *g = c + t * (c - p);
                    }
                }
            }
            match self.newton(next, &mut guess) {
                Ok(res) => {
                    debug!("shell: converged at W0 = {next:.4} (residual {res:.2e})");
                    previous = Some(std::mem::replace(
                        &mut current,
                        ShellState { w0: next, y: guess },
                    ));
                    step = (step * 1.5).min(MAX_CONTINUATION_STEP);
                }
                Err(failure) => {
                    debug!("shell: Newton failed at W0 = {next:.4}: {failure:?}");
                    step *= 0.5;
                    if step < MIN_CONTINUATION_STEP {
                        return Err(Error::NonConvergence {
                            last_good_w0: current.w0,
                        });
                    }
                }
            }
        }
        Ok(current)
    }

    pub fn solution(&self, state: &ShellState) -> ShellSolution {
        let n = self.dim();
        let m = self.grid.len();
        let (mut w, mut psi, mut hoop, mut radial) = (
            Vec::with_capacity(m),
            Vec::with_capacity(m),
            Vec::with_capacity(m),
            Vec::with_capacity(m),
        );
        for (i, &r) in self.grid.iter().enumerate() {
            let node = &state.y[i * n..(i + 1) * n];
            w.push(node[W]);
            psi.push(node[PSI]);
            hoop.push(node[P] / r);
            radial.push(node[PSI] / r);
        }
        let annulus = compressive_interval(&self.grid, &hoop);
        let force = 2.0 * std::f64::consts::PI * state.y[self.force_index()];
        let mut residual = vec![0.0; state.y.len()];
        match self.model(state.w0) {
            Model::Membrane(s) => {
                Collocation::new(&s, &self.grid).residual(&state.y, &mut residual)
            }
            Model::Full(s) => Collocation::new(&s, &self.grid).residual(&state.y, &mut residual),
        }
        ShellSolution {
            rho: self.grid.clone(),
            w,
            psi,
            hoop_stress: hoop,
            radial_stress: radial,
            w0: state.w0,
            force,
            annulus,
            membrane_limit: self.options.membrane_limit,
            newton_residual: residual.iter().fold(0.0, |a, r| a.max(r.abs())),
        }
    }

    fn min_hoop(&self, state: &ShellState) -> f64 {
        let n = self.dim();
        self.grid
            .iter()
            .enumerate()
            .map(|(i, &r)| state.y[i * n + P] / r)
            .fold(f64::INFINITY, f64::min)
    }

    /// Solves at each depth of `depths` by one continuation pass. Depths are
    /// visited in the given order.
    pub fn sweep(&self, depths: &[f64]) -> Result<Vec<ShellSolution>> {
        let mut state = self.flat_state();
        let mut out = Vec::with_capacity(depths.len());
        for &d in depths {
            state = self.continue_to(&state, d)?;
            out.push(self.solution(&state));
        }
        Ok(out)
    }

    /// Bisects for the shallowest depth with compressive hoop stress,
    /// between `shallow` (no compression) and `deep` (compression).
    fn bisect(&self, shallow: ShellState, deep: ShellState) -> Result<CriticalDepth> {
        let (mut a, mut b) = (shallow, deep);
        let mut iterations = 0;
        while (a.w0 - b.w0).abs() > CRITICAL_DEPTH_TOL {
            let mid = 0.5 * (a.w0 + b.w0);
            let state = self.continue_to(&a, mid)?;
            iterations += 1;
            if self.min_hoop(&state) < 0.0 {
                b = state;
            } else {
                a = state;
            }
        }
        Ok(CriticalDepth {
            w0: 0.5 * (a.w0 + b.w0),
            iterations,
            bracket: (a.w0, b.w0),
        })
    }

    fn warn_bendability(&self) {
        let tau = self.params.tau();
        if tau < MIN_BENDABILITY {
            warn!("tau = {tau:.3} < {MIN_BENDABILITY}: the membrane limit is not applicable");
        }
    }

    pub fn critical_depth(&self) -> Result<CriticalDepth> {
        self.warn_bendability();
        let mut shallow = self.flat_state();
        loop {
            let next = (shallow.w0 - MAX_CONTINUATION_STEP).max(CRITICAL_SEARCH_LIMIT);
            let state = self.continue_to(&shallow, next)?;
            if self.min_hoop(&state) < 0.0 {
                return self.bisect(shallow, state);
            }
            if next <= CRITICAL_SEARCH_LIMIT {
                return Err(Error::Validation(format!(
                    "no compressive hoop stress found down to W0 = {CRITICAL_SEARCH_LIMIT}"
                )));
            }
            shallow = state;
        }
    }

    /// Bisection inside `(shallow, deep)`, e.g. `(-1.0, -4.0)`.
    pub fn critical_depth_bracketed(&self, shallow: f64, deep: f64) -> Result<CriticalDepth> {
        self.warn_bendability();
        ensure(deep < shallow && shallow <= 0.0, || {
            format!("bracket must satisfy deep < shallow <= 0, got ({shallow}, {deep})")
        })?;
        let a = self.continue_to(&self.flat_state(), shallow)?;
        let b = self.continue_to(&a, deep)?;
        ensure(self.min_hoop(&a) >= 0.0 && self.min_hoop(&b) < 0.0, || {
            format!("bracket ({shallow}, {deep}) does not contain the onset of compression")
        })?;
        self.bisect(a, b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriticalDepth {
    pub w0: f64,
    pub iterations: usize,
    /// Final `(no compression, compression)` depths.
    pub bracket: (f64, f64),
}

/// Solves the indentation problem at depth `w0` by continuation from the
/// unindented state.
pub fn solve_indentation(
    params: &ShellParams,
    w0: f64,
    options: &ShellOptions,
) -> Result<ShellSolution> {
    ensure(w0.is_finite() && w0 <= 0.0, || {
        format!("indentation depth W0 must be <= 0, got {w0}")
    })?;
    let solver = ShellSolver::new(*params, *options)?;
    let state = solver.continue_to(&solver.flat_state(), w0)?;
    Ok(solver.solution(&state))
}

/// Depth at which compressive hoop stress first appears.
pub fn critical_depth(params: &ShellParams, options: &ShellOptions) -> Result<CriticalDepth> {
    ShellSolver::new(*params, *options)?.critical_depth()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> ShellParams {
        ShellParams::with_tau(0.13, 8.6e-4, 2.34e6, 0.4, 40.0).unwrap()
    }

    #[test]
    fn grid_is_increasing_with_exact_ends() {
        let g = shell_grid(1e-5, 30.0, 500);
        assert_eq!(g[0], 1e-5);
        assert_eq!(g[499], 30.0);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn zero_depth_is_the_flat_state() {
        let s = solve_indentation(&params(), 0.0, &ShellOptions::default()).unwrap();
        assert!(s.force.abs() < 1e-12);
        assert!(s.w.iter().all(|w| w.abs() < 1e-12));
        for (r, p) in s.rho.iter().zip(&s.psi) {
            assert!((p - 0.5 * r).abs() < 1e-12);
        }
        assert!(s.annulus.is_none());
    }

    #[test]
    fn shallow_indentation_is_tensile() {
        let s = solve_indentation(&params(), -1.0, &ShellOptions::default()).unwrap();
        assert!(s.annulus.is_none());
        assert!(s.min_hoop_stress() >= 0.0);
        assert!(s.force > 0.0);
        assert!(s.satisfies_far_field());
        assert!(s.newton_residual < 1e-8);
    }

    #[test]
    fn deep_indentation_has_an_annulus() {
        let s = solve_indentation(&params(), -4.0, &ShellOptions::default()).unwrap();
        let (lo, hi) = s.annulus.expect("annulus");
        assert!(lo > s.rho[0] && hi > lo);
        for (r, h) in s.rho.iter().zip(&s.hoop_stress) {
            let inside = *r > lo && *r < hi;
            if *h < 0.0 {
                assert!(*r >= lo - 1e-9 && *r <= hi + 1e-9);
            } else {
                assert!(!inside || h.abs() < 1e-9);
            }
        }
    }

    #[test]
    fn rejects_invalid_options() {
        let bad = ShellOptions {
            grid_size: 100,
            ..ShellOptions::default()
        };
        assert!(solve_indentation(&params(), -1.0, &bad).is_err());
        let bad = ShellOptions {
            rho_inf: 10.0,
            ..ShellOptions::default()
        };
        assert!(solve_indentation(&params(), -1.0, &bad).is_err());
        assert!(solve_indentation(&params(), 0.5, &ShellOptions::default()).is_err());
    }

    #[test]
    fn full_model_converges() {
        let p = ShellParams::with_tau(0.13, 8.6e-4, 2.34e6, 0.4, 100.0).unwrap();
        let s = solve_indentation(&p, -2.0, &ShellOptions::full()).unwrap();
        assert!(s.force > 0.0 && s.satisfies_far_field());
    }
}

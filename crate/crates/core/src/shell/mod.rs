//! Axisymmetric pressurized shallow-shell indentation in nondimensional form.
//!
//! Lengths in the plane are scaled by `l_p = (P_g R^3 / (E h))^(1/2)`,
//! deflections by `l_p^2 / R`, and forces by `P_g l_p^2`. In these units the
//! membrane-limit problem has no free parameter apart from Poisson's ratio.

mod banded;
pub mod bvp;
mod params;
mod scaling;
mod solver;
mod system;

pub use params::ShellParams;
pub use scaling::{
    cap_profile, cap_volume_change, wrinkle_count, wrinkle_count_for_tau, CapProfile, WrinkleCount,
    WRINKLE_PREFACTOR,
};
pub use solver::{
    critical_depth, shell_grid, solve_indentation, CriticalDepth, ShellOptions, ShellSolution,
    ShellSolver, ShellState, CRITICAL_DEPTH_TOL, DEFAULT_GRID_SIZE, DEFAULT_INNER_FRACTION,
    DEFAULT_RHO_INF, MAX_CONTINUATION_STEP, MIN_GRID_SIZE, MIN_RHO_INF,
};

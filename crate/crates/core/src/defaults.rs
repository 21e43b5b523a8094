//! Every numerical default in one place. The CLI echoes the effective values
//! into its run manifest.

use serde::Serialize;

/// Outer radius of the default radial grid.
pub const R_MAX: f64 = 50.0;
/// Node count of the default radial grid.
pub const GRID_NODES: usize = 4096;
/// Final value below which `exp(-eps' r) f(r)` counts as vanished.
pub const F_TAIL_TOL: f64 = 1e-6;
/// Builtins use `eps' = fraction * beta * eps / 2`.
pub const EPSILON_PRIME_FRACTION: f64 = 0.99;
/// Relative slack in the `sigma >= eps`, `g >= eps` comparisons.
pub const HYPOTHESIS_REL_TOL: f64 = 1e-12;

/// Relative tolerance of the adaptive Romberg rule.
pub const QUAD_TOL: f64 = 1e-10;
/// The grid is extended until the unnormalized radial density at `r_max`
/// is below this fraction of its maximum.
pub const TAIL_REL: f64 = 1e-10;
/// Maximum number of `r_max` doublings.
pub const MAX_EXTENSIONS: usize = 8;

pub const SIM_DT: f64 = 1e-3;
pub const SIM_T_END: f64 = 50.0;
pub const SIM_PATHS: usize = 1000;
pub const SEED: u64 = 0x5eed;
/// Below this radius the direction of the momentum is taken as `e_1`.
pub const THETA_DEGENERATE_R: f64 = 1e-9;

/// Central-difference step for test-function gradients.
pub const FD_STEP: f64 = 1e-5;
/// Second-difference step for Laplacians (a `1e-5` step loses ~6 digits to
/// cancellation).
pub const FD_STEP_SECOND: f64 = 1e-4;
/// Polar Gauss–Legendre order of the sphere rule.
pub const SPHERE_ORDER: usize = 16;

/// Cells whose mass falls below this fraction of the largest are cut off
/// the generator.
pub const WEIGHT_UNDERFLOW: f64 = 1e-250;
/// Relative agreement required between the gap at `n` and `2n` nodes.
pub const GAP_REFINE_TOL: f64 = 5e-3;
/// Absolute bisection tolerance of the tridiagonal eigensolver.
pub const EIG_TOL: f64 = 1e-10;

/// Smoothing length of the Lyapunov surrogate `exp(c sqrt(delta^2 + r^2))`.
pub const LYAPUNOV_DELTA: f64 = 1e-3;
/// Steps of the default (c, R) search grids.
pub const LYAPUNOV_SEARCH_STEPS: usize = 200;
/// Default upper end of the `c` search range, as a fraction of `beta eps / 2`.
pub const LYAPUNOV_C_FRACTION: f64 = 0.5;
/// Relative slack when comparing `1/c2` with the numerical gap.
pub const POINCARE_TOL: f64 = 1e-6;

pub const DECAY_DT: f64 = 0.05;
pub const DECAY_T_END: f64 = 100.0;
pub const DECAY_CHECKPOINT_EVERY: usize = 20;
/// Leading trapezoid steps replaced by two backward Euler half steps.
pub const RANNACHER_STEPS: usize = 2;
/// Increases of the L² distance below this fraction of the initial distance
/// are round-off and not reported.
pub const MONOTONE_FLOOR: f64 = 1e-9;
/// Per-component variance of the initial Gaussian law relative to the
/// equilibrium second moment per component.
pub const BUMP_VARIANCE_FRACTION: f64 = 0.8;
/// Window of the log-linear rate fit, relative to the initial distance.
pub const FIT_WINDOW: (f64, f64) = (1e-6, 1e-1);
pub const MIN_FIT_POINTS: usize = 5;
/// Negativity allowed in an evolved density.
pub const DENSITY_NEG_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Serialize)]
pub struct DefaultsTable {
    pub r_max: f64,
    pub grid_nodes: usize,
    pub f_tail_tol: f64,
    pub epsilon_prime_fraction: f64,
    pub hypothesis_rel_tol: f64,
    pub quad_tol: f64,
    pub tail_rel: f64,
    pub sim_dt: f64,
    pub sim_t_end: f64,
    pub sim_paths: usize,
    pub seed: u64,
    pub fd_step: f64,
    pub fd_step_second: f64,
    pub sphere_order: usize,
    pub gap_refine_tol: f64,
    pub eig_tol: f64,
    pub lyapunov_delta: f64,
    pub lyapunov_search_steps: usize,
    pub lyapunov_c_fraction: f64,
    pub decay_dt: f64,
    pub decay_t_end: f64,
    pub decay_checkpoint_every: usize,
    pub rannacher_steps: usize,
    pub monotone_floor: f64,
    pub bump_variance_fraction: f64,
    pub fit_window: (f64, f64),
}

pub fn table() -> DefaultsTable {
    DefaultsTable {
        r_max: R_MAX,
        grid_nodes: GRID_NODES,
        f_tail_tol: F_TAIL_TOL,
        epsilon_prime_fraction: EPSILON_PRIME_FRACTION,
        hypothesis_rel_tol: HYPOTHESIS_REL_TOL,
        quad_tol: QUAD_TOL,
        tail_rel: TAIL_REL,
        sim_dt: SIM_DT,
        sim_t_end: SIM_T_END,
        sim_paths: SIM_PATHS,
        seed: SEED,
        fd_step: FD_STEP,
        fd_step_second: FD_STEP_SECOND,
        sphere_order: SPHERE_ORDER,
        gap_refine_tol: GAP_REFINE_TOL,
        eig_tol: EIG_TOL,
        lyapunov_delta: LYAPUNOV_DELTA,
        lyapunov_search_steps: LYAPUNOV_SEARCH_STEPS,
        lyapunov_c_fraction: LYAPUNOV_C_FRACTION,
        decay_dt: DECAY_DT,
        decay_t_end: DECAY_T_END,
        decay_checkpoint_every: DECAY_CHECKPOINT_EVERY,
        rannacher_steps: RANNACHER_STEPS,
        monotone_floor: MONOTONE_FLOOR,
        bump_variance_fraction: BUMP_VARIANCE_FRACTION,
        fit_window: FIT_WINDOW,
    }
}

//! Monte Carlo simulation of Dunkl processes and the large-multiplicity
//! freezing experiments.

mod config;
mod freeze;
mod ode;
mod roots;
mod sim;
mod stats;

pub use config::{BoundaryPolicy, Scheme, SimConfig, DT_FLOOR_HALVINGS, MAX_JUMP_PROBABILITY};
pub use freeze::{
    freezing_experiment, freezing_experiment_with, laguerre_freezing_probe, FreezeRow, FreezeSetup,
    FreezeTable, FREEZE_EPSILON,
};
pub use ode::{deterministic_freeze_ode, integrate_freeze_ode, FreezeOdeResult, OdeTrajectory, ODE_START_SPREAD};
pub use roots::{
    hermite_identity_residuals, hermite_ode_remainder_vanishes, hermite_poly, hermite_roots,
    laguerre_identity_residuals, laguerre_ode_remainder_vanishes, laguerre_poly, laguerre_roots,
    pair_sum_residual, uni_derivative, uni_divrem, uni_eval_f64, UniPoly, MAX_ROOTS,
};
pub use sim::{path_rng, replay, simulate_dunkl, simulate_path, simulate_radial, JumpEvent, StepRecord, Trajectory};
pub use stats::{jump_consistency, moment_law, EnsembleStats, JumpCheck, MomentLawCheck, Moments, Observable, Summary};

/// Run `f` on a rayon pool with at most `threads` workers.
pub fn with_thread_cap<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    match threads.filter(|&t| t > 0) {
        None => f(),
        Some(t) => match rayon::ThreadPoolBuilder::new().num_threads(t).build() {
            Ok(pool) => pool.install(f),
            Err(_) => f(),
        },
    }
}

//! Retrieval of piecewise-constant Δβ(z) profiles from intensity spectra.
//!
//! A genetic algorithm (tournament selection, uniform crossover, Gaussian
//! mutation, elitism) searches section offsets inside a box; the best
//! candidates of each generation are polished by BFGS. Intensity spectra do
//! not determine a profile uniquely (a profile and its mirror image give the
//! same spectrum), so fits are judged on spectrum MSE only.

mod bfgs;
mod ga;
mod objective;
mod predict;

pub use bfgs::{local_refine, RefineOptions, RefineOutcome, RefineStatus};
pub use ga::{
    candidate_rng, crossover, crossover_offsets, mutate, mutate_offsets, run_fit, tournament_select, Checkpoint,
    FitResult, GaConfig, RunControl, TraceRow,
};
pub use objective::{objective_mse, FitProblem};
pub use predict::predict_at_conditions;

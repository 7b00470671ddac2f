//! Symmetric Strang splitting with Crank–Nicolson substeps: sparse SPD
//! solves for diffusion, entry-wise Newton for boundary reaction DoFs and
//! cell-local Newton systems for moment DoFs.

mod baseline;
mod config;
mod diffusion;
mod problem;
mod reaction;
mod stepper;
#[cfg(test)]
mod tests;

pub use baseline::{coupled_baseline_reaction, quadrature_load, source_load, BASELINE_TOL};
pub use config::{ReactionMode, Splitting, SplittingConfig};
pub use diffusion::LinearStepOperator;
pub use problem::{ProblemSpec, Reaction, SpaceFn, SpaceTimeFn};
pub use reaction::{boundary_stage, local_moment_solve, reaction_scalar_solve, reaction_substep, NewtonSettings, ScalarSolve};
pub use stepper::{PhaseTimes, Stepper};

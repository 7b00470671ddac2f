use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::LinearSolveMode;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Splitting {
    /// `D(tau/2) R(tau) D(tau/2)`.
    Drd,
    /// `R(tau/2) D(tau) R(tau/2)`.
    Rdr,
}

/// How the reaction substep treats the nonlinear term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ReactionMode {
    /// Entry-wise boundary solves, then cell-local moment systems.
    #[default]
    Interpolatory,
    /// Fixed-point iteration on the mass-coupled system with a quadrature
    /// load vector; used for comparison.
    CoupledBaseline,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SplittingConfig {
    pub variant: Splitting,
    pub tau: f64,
    pub final_time: f64,
    pub newton_tol: f64,
    pub newton_max_iter: usize,
    pub linear: LinearSolveMode,
    pub reaction_mode: ReactionMode,
    /// Iteration cap of the coupled baseline.
    pub baseline_max_iter: usize,
}

impl Default for SplittingConfig {
    fn default() -> Self {
        SplittingConfig {
            variant: Splitting::Rdr,
            tau: 1e-2,
            final_time: 1.0,
            newton_tol: 1e-10,
            newton_max_iter: 50,
            linear: LinearSolveMode::Direct,
            reaction_mode: ReactionMode::Interpolatory,
            baseline_max_iter: 100,
        }
    }
}

impl SplittingConfig {
    pub fn new(variant: Splitting, tau: f64, final_time: f64) -> Self {
        SplittingConfig {
            variant,
            tau,
            final_time,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau > 0.0) || !self.tau.is_finite() {
            return Err(Error::Config(format!("time step must be positive, got {}", self.tau)));
        }
        if !(self.final_time >= 0.0) {
            return Err(Error::Config(format!("final time must be non-negative, got {}", self.final_time)));
        }
        if !(self.newton_tol > 0.0) || self.newton_max_iter == 0 {
            return Err(Error::Config("Newton tolerance and iteration cap must be positive".into()));
        }
        Ok(())
    }

    /// Number of steps `n` with `n tau = T` up to `1e-12`.
    pub fn num_steps(&self) -> Result<usize> {
        let n = (self.final_time / self.tau).round();
        if (n * self.tau - self.final_time).abs() > 1e-12 * self.final_time.max(1.0) {
            return Err(Error::Config(format!(
                "final time {} is not a multiple of the time step {}",
                self.final_time, self.tau
            )));
        }
        Ok(n as usize)
    }
}

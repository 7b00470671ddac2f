use std::time::Instant;

use log::warn;
use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::baseline::{coupled_baseline_reaction, source_load};
use super::config::{ReactionMode, Splitting, SplittingConfig};
use super::diffusion::LinearStepOperator;
use super::problem::ProblemSpec;
use super::reaction::{reaction_substep, NewtonSettings};
use crate::assembly::{Discretization, StateVector};
use crate::error::{Error, Result};
use crate::linalg::SpdSolver;

/// Accumulated wall-clock seconds per phase. The factorization done by
/// [`Stepper::new`] counts as linear time and as total time.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PhaseTimes {
    pub linear: f64,
    pub nonlinear: f64,
    pub total: f64,
    pub steps: usize,
    /// Fixed-point iterations of the coupled baseline, summed over substeps.
    pub baseline_iterations: usize,
}

/// Strang splitting time integrator for one discretization and problem.
pub struct Stepper<'a> {
    disc: &'a Discretization,
    problem: &'a ProblemSpec,
    config: SplittingConfig,
    diffusion: LinearStepOperator,
    mass_solver: Option<SpdSolver>,
    pub times: PhaseTimes,
}

impl<'a> Stepper<'a> {
    /// Factorizes the diffusion operator once for the configured step.
    pub fn new(disc: &'a Discretization, problem: &'a ProblemSpec, config: SplittingConfig) -> Result<Self> {
        config.validate()?;
        let lf = problem.reaction.lipschitz();
        if lf > 0.0 && config.tau >= 2.0 / lf {
            warn!(
                "time step {} is not below 2 / L_f = {:.4}; the reaction solves may not be well posed",
                config.tau,
                2.0 / lf
            );
        }
        let s = match config.variant {
            Splitting::Drd => 0.5 * config.tau,
            Splitting::Rdr => config.tau,
        };
        let start = Instant::now();
        let diffusion = LinearStepOperator::new(disc, problem.eps, s, config.linear)?;
        let mass_solver = match config.reaction_mode {
            ReactionMode::CoupledBaseline => Some(SpdSolver::new(&disc.mass, config.linear)?),
            ReactionMode::Interpolatory => None,
        };
        let setup = start.elapsed().as_secs_f64();
        let times = PhaseTimes {
            linear: setup,
            total: setup,
            ..Default::default()
        };
        Ok(Stepper {
            disc,
            problem,
            config,
            diffusion,
            mass_solver,
            times,
        })
    }

    pub fn config(&self) -> &SplittingConfig {
        &self.config
    }

    pub fn diffusion_substep(&mut self, u: &DVector<f64>) -> Result<DVector<f64>> {
        let start = Instant::now();
        let out = self.diffusion.apply(u);
        self.times.linear += start.elapsed().as_secs_f64();
        out
    }

    /// Reaction over `[t0, t0 + s]`.
    pub fn reaction_substep(&mut self, u: &DVector<f64>, t0: f64, s: f64) -> Result<DVector<f64>> {
        let start = Instant::now();
        let disc = self.disc;
        let f = self.problem.reaction;
        let newton = NewtonSettings {
            tol: self.config.newton_tol,
            max_iter: self.config.newton_max_iter,
        };
        let out = match self.config.reaction_mode {
            ReactionMode::Interpolatory => {
                let gsum = self.problem.source.as_ref().map(|g| {
                    disc.interpolate(|p| g(p, t0)) + disc.interpolate(|p| g(p, t0 + s))
                });
                reaction_substep(disc, u, s, &f, gsum.as_ref(), newton)
            }
            ReactionMode::CoupledBaseline => {
                let gsum = self
                    .problem
                    .source
                    .as_ref()
                    .map(|g| source_load(disc, |p| g(p, t0)) + source_load(disc, |p| g(p, t0 + s)));
                let solver = self.mass_solver.as_ref().expect("mass solver for the coupled mode");
                coupled_baseline_reaction(disc, solver, u, s, &f, gsum.as_ref(), self.config.baseline_max_iter).map(
                    |(v, it)| {
                        self.times.baseline_iterations += it;
                        v
                    },
                )
            }
        };
        self.times.nonlinear += start.elapsed().as_secs_f64();
        out
    }

    /// One splitting step from `u.time` to `u.time + tau`.
    pub fn step(&mut self, u: &StateVector) -> Result<StateVector> {
        let start = Instant::now();
        let (t, tau) = (u.time, self.config.tau);
        let values = match self.config.variant {
            Splitting::Drd => {
                let a = self.diffusion_substep(&u.values)?;
                let b = self.reaction_substep(&a, t, tau)?;
                self.diffusion_substep(&b)?
            }
            Splitting::Rdr => {
                let a = self.reaction_substep(&u.values, t, 0.5 * tau)?;
                let b = self.diffusion_substep(&a)?;
                self.reaction_substep(&b, t + 0.5 * tau, 0.5 * tau)?
            }
        };
        self.times.total += start.elapsed().as_secs_f64();
        self.times.steps += 1;
        Ok(StateVector::new(values, t + tau))
    }

    /// Runs from `u0` to the configured final time. `observer` is called with
    /// the state at the steps nearest to each time in `observe_at`.
    pub fn run(
        &mut self,
        u0: StateVector,
        observe_at: &[f64],
        mut observer: impl FnMut(&StateVector),
    ) -> Result<StateVector> {
        let n = self.config.num_steps()?;
        let tau = self.config.tau;
        let t0 = u0.time;
        let mut marks: Vec<usize> = observe_at
            .iter()
            .map(|&t| ((t - t0) / tau).round().max(0.0) as usize)
            .filter(|&i| i <= n)
            .collect();
        marks.sort_unstable();
        marks.dedup();
        let mut next_mark = marks.iter().peekable();
        let mut u = u0;
        for i in 0..=n {
            if i > 0 {
                u = self.step(&u).map_err(|e| Error::Step {
                    step: i,
                    source: Box::new(e),
                })?;
                u.time = t0 + i as f64 * tau;
            }
            while next_mark.peek() == Some(&&i) {
                observer(&u);
                next_mark.next();
            }
        }
        Ok(u)
    }
}

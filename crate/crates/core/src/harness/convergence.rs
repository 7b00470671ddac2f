use log::{info, warn};

use super::report::{ConvergenceReport, ConvergenceRow, RefinementMode};
use super::run::simulate;
use super::scenario::{scenario_manufactured, ProblemKind, TAU_CONSTANT};
use crate::assembly::Discretization;
use crate::error::{Error, Result};
use crate::fixtures::{MeshFamily, DEFAULT_SEED, LEVELS};
use crate::linalg::LinearSolveMode;
use crate::timestep::{Splitting, SplittingConfig};

/// Time steps of the temporal study, halved from `1/8`.
pub const TIME_STEPS: [f64; 4] = [1.25e-1, 6.25e-2, 3.125e-2, 1.5625e-2];

#[derive(Debug, Clone)]
pub struct ConvergenceStudy {
    pub kind: ProblemKind,
    pub family: MeshFamily,
    pub k: usize,
    pub levels: usize,
    pub mode: RefinementMode,
    pub variant: Splitting,
    pub seed: u64,
    pub tau_constant: f64,
    pub linear: LinearSolveMode,
}

impl ConvergenceStudy {
    pub fn new(kind: ProblemKind, family: MeshFamily, k: usize, levels: usize, mode: RefinementMode) -> Self {
        ConvergenceStudy {
            kind,
            family,
            k,
            levels,
            mode,
            variant: Splitting::Rdr,
            seed: DEFAULT_SEED,
            tau_constant: TAU_CONSTANT,
            linear: LinearSolveMode::Direct,
        }
    }

    pub fn with_variant(mut self, variant: Splitting) -> Self {
        self.variant = variant;
        self
    }
}

/// Space mode refines the mesh ladder with `tau` coupled to `h`; time mode
/// keeps the finest mesh and halves `tau` from `1/8`. A failed run is kept as
/// a row with a NaN error.
pub fn run_convergence(study: &ConvergenceStudy) -> Result<ConvergenceReport> {
    let max_levels = match study.mode {
        RefinementMode::Space => LEVELS,
        RefinementMode::Time => usize::MAX,
    };
    if study.levels < 3 || study.levels > max_levels {
        return Err(Error::InvalidArgument(format!(
            "a convergence study needs 3..={max_levels} refinements, got {}",
            study.levels
        )));
    }
    let time_base = match study.mode {
        RefinementMode::Time => {
            let s = scenario_manufactured(study.kind, study.k, study.family, LEVELS - 1, study.seed, study.tau_constant)?;
            let d = s.discretize()?;
            Some((s, d))
        }
        RefinementMode::Space => None,
    };
    let mut rows = Vec::with_capacity(study.levels);
    for level in 0..study.levels {
        let mut scn = match &time_base {
            None => scenario_manufactured(study.kind, study.k, study.family, level, study.seed, study.tau_constant)?,
            Some((base, _)) => {
                let mut s = base.clone();
                s.splitting.tau = TIME_STEPS[0] / f64::powi(2.0, level as i32);
                s.tau_constant = None;
                s
            }
        };
        scn.splitting = SplittingConfig {
            variant: study.variant,
            linear: study.linear,
            ..scn.splitting
        };
        let built: Discretization;
        let disc: Result<&Discretization> = match &time_base {
            Some((_, d)) => Ok(d),
            None => match scn.discretize() {
                Ok(d) => {
                    built = d;
                    Ok(&built)
                }
                Err(e) => Err(e),
            },
        };
        let h = scn.mesh.mesh_size();
        let tau = scn.splitting.tau;
        let row = match disc.and_then(|d| simulate(&scn, d, |_| {}).map(|o| (d.len(), o))) {
            Ok((dofs, o)) => {
                let e = o.l2_error.unwrap_or(f64::NAN);
                info!("level {level}: h = {h:.4e}, tau = {tau:.4e}, dofs = {dofs}, error = {e:.4e}");
                ConvergenceRow {
                    level,
                    h,
                    tau,
                    dofs,
                    l2_error: e,
                    eoc: None,
                    t_linear_s: o.times.linear,
                    t_nonlinear_s: o.times.nonlinear,
                    t_total_s: o.times.total,
                    failure: None,
                }
            }
            Err(e) => {
                warn!("level {level} failed: {e}");
                ConvergenceRow {
                    level,
                    h,
                    tau,
                    dofs: 0,
                    l2_error: f64::NAN,
                    eoc: None,
                    t_linear_s: 0.0,
                    t_nonlinear_s: 0.0,
                    t_total_s: 0.0,
                    failure: Some(e.to_string()),
                }
            }
        };
        rows.push(row);
    }
    let mut report = ConvergenceReport {
        family: study.family,
        k: study.k,
        mode: study.mode,
        variant: study.variant,
        tau_constant: (study.mode == RefinementMode::Space).then_some(study.tau_constant),
        rows,
    };
    report.compute_rates();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn too_few_levels() {
        let s = ConvergenceStudy::new(ProblemKind::Accuracy, MeshFamily::Distorted, 1, 2, RefinementMode::Space);
        assert_eq!(run_convergence(&s).unwrap_err().code(), 2);
    }

    #[test]
    fn heat_space_rates_at_k1() {
        let s = ConvergenceStudy::new(ProblemKind::Heat, MeshFamily::Distorted, 1, 3, RefinementMode::Space);
        let r = run_convergence(&s).unwrap();
        assert_eq!(r.rows.len(), 3);
        assert!(r.rows.iter().all(|row| row.failure.is_none()));
        let p = r.fitted_rate().unwrap();
        assert!(p > 1.7, "{r:?}");
        assert_eq!(r.tau_constant, Some(TAU_CONSTANT));
    }
}

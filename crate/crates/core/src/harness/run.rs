use std::path::{Path, PathBuf};

use log::info;
use serde::{Deserialize, Serialize};

use super::scenario::Scenario;
use super::vtk::export_vtk;
use crate::assembly::{Discretization, StateVector};
use crate::error::Result;
use crate::timestep::{PhaseTimes, Stepper};

/// Final state of a run with its timings.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub state: StateVector,
    pub times: PhaseTimes,
    /// L2 error of `Pi_0 u_h` at the final time, for manufactured problems.
    pub l2_error: Option<f64>,
}

/// Integrates `scn` on `disc` from the interpolated initial data.
/// `observer` sees the states nearest to `scn.output_times`.
pub fn simulate(scn: &Scenario, disc: &Discretization, observer: impl FnMut(&StateVector)) -> Result<RunOutcome> {
    let mut stepper = Stepper::new(disc, &scn.problem, scn.splitting)?;
    let initial = &scn.problem.initial;
    let u0 = disc.interpolate_state(|p| initial(p), 0.0);
    let state = stepper.run(u0, &scn.output_times, observer)?;
    let l2_error = scn.problem.exact.as_ref().map(|u| disc.l2_error(&state.values, |p| u(p, state.time)));
    Ok(RunOutcome {
        state,
        times: stepper.times,
        l2_error,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub time: f64,
    pub path: Option<PathBuf>,
    pub min: f64,
    pub max: f64,
}

/// What `svem run` reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub name: String,
    pub mesh: String,
    pub k: usize,
    pub dofs: usize,
    pub final_time: f64,
    pub l2_error: Option<f64>,
    pub times: PhaseTimes,
    pub snapshots: Vec<Snapshot>,
}

/// Runs `scn`, writing a VTK file per output time into `out` when given.
pub fn run_scenario(scn: &Scenario, out: Option<&Path>) -> Result<RunSummary> {
    let disc = scn.discretize()?;
    info!("{}: {} cells, k = {}, {} dofs", scn.name, disc.mesh.num_cells(), scn.k, disc.len());
    if let Some(dir) = out {
        std::fs::create_dir_all(dir)?;
    }
    let mut snapshots = Vec::new();
    let mut failure = None;
    let outcome = simulate(scn, &disc, |u| {
        let path = out.map(|dir| dir.join(format!("{}_{:04}.vtk", scn.name, snapshots.len())));
        if let Some(p) = &path {
            if let Err(e) = export_vtk(&disc, &u.values, p) {
                failure.get_or_insert(e);
            }
        }
        snapshots.push(Snapshot {
            time: u.time,
            path,
            min: u.values.min(),
            max: u.values.max(),
        });
    })?;
    if let Some(e) = failure {
        return Err(e);
    }
    let summary = RunSummary {
        name: scn.name.clone(),
        mesh: scn.mesh_name.clone(),
        k: scn.k,
        dofs: disc.len(),
        final_time: outcome.state.time,
        l2_error: outcome.l2_error,
        times: outcome.times,
        snapshots,
    };
    if let Some(dir) = out {
        std::fs::write(dir.join(format!("{}_summary.json", scn.name)), serde_json::to_string_pretty(&summary)?)?;
    }
    Ok(summary)
}

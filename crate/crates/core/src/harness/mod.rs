//! Experiment layer: scenarios, convergence studies, DoF reports, timing
//! benchmarks and CSV / VTK output.

mod bench;
mod convergence;
mod dofs;
mod report;
mod run;
mod scenario;
mod vtk;

pub use bench::{benchmark, compare, l2_distance, with_threads, BenchComparison, BenchConfig, BenchMode, BenchResult};
pub use convergence::{run_convergence, ConvergenceStudy, TIME_STEPS};
pub use dofs::{dof_report, write_dof_table, DofRow};
pub use report::{
    eoc, import_csv, least_squares_rate, read_rows, write_rows, ConvergenceReport, ConvergenceRow, RefinementMode,
    CSV_COLUMNS,
};
pub use run::{run_scenario, simulate, RunOutcome, RunSummary, Snapshot};
pub use scenario::{
    allen_cahn_initial, coupled_time_step, manufactured_solution, manufactured_source, problem, scenario_accuracy,
    scenario_allen_cahn, scenario_manufactured, MeshSource, ProblemKind, Scenario, ScenarioConfig,
    ALLEN_CAHN_SNAPSHOTS, TAU_CONSTANT,
};
pub use vtk::{cell_averages, export_vtk, write_vtk};

//! Global DoF numbering, sparse assembly, interpolation and error evaluation.

mod discretization;
mod dofmap;

pub use discretization::{assemble, build_elements, Discretization, StateVector};
pub use dofmap::{build_dof_map, dof_count, DofMap};

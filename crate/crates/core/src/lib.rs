//! Serendipity virtual elements for semilinear parabolic problems
//! `u_t - eps Lap u + f(u) = g` on polygonal meshes with homogeneous Neumann
//! boundary conditions, integrated in time by symmetric Strang splitting.

pub mod assembly;
pub mod error;
pub mod linalg;
pub mod fixtures;
pub mod harness;
pub mod mesh;
pub mod polyspace;
pub mod projectors;
pub mod timestep;

pub use error::{Error, Result};

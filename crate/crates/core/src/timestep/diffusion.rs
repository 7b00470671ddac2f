use nalgebra::DVector;
use nalgebra_sparse::CsrMatrix;

use crate::assembly::Discretization;
use crate::error::Result;
use crate::linalg::{mul, LinearSolveMode, SpdSolver};

/// Crank–Nicolson diffusion over a substep of length `s`: the factorized
/// `M + (s/2) A` and the explicit `M - (s/2) A`.
#[derive(Debug, Clone)]
pub struct LinearStepOperator {
    pub s: f64,
    lhs: SpdSolver,
    rhs: CsrMatrix<f64>,
}

impl LinearStepOperator {
    pub fn new(disc: &Discretization, eps: f64, s: f64, mode: LinearSolveMode) -> Result<Self> {
        let a = disc.stiffness_matrix(0.5 * s * eps);
        let lhs = &disc.mass + &a;
        let rhs = &disc.mass - &a;
        Ok(LinearStepOperator {
            s,
            lhs: SpdSolver::new(&lhs, mode)?,
            rhs,
        })
    }

    /// `(M + (s/2) A)^{-1} (M - (s/2) A) u`.
    pub fn apply(&self, u: &DVector<f64>) -> Result<DVector<f64>> {
        let b = mul(&self.rhs, u);
        self.lhs.solve(&b, Some(u))
    }
}

use nalgebra::DVector;
use nalgebra_sparse::factorization::CscCholesky;
use nalgebra_sparse::{CscMatrix, CsrMatrix};
use serde::{Deserialize, Serialize};

use super::{permute_symmetric, reverse_cuthill_mckee, spmv, IncompleteCholesky};
use crate::error::{Error, Result};

/// Drop tolerance of the incomplete factorization.
pub const ICT_DROP_TOLERANCE: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum LinearSolveMode {
    /// Sparse Cholesky factorization, computed once.
    #[default]
    Direct,
    /// Preconditioned conjugate gradients to relative residual `tol`.
    Iterative { tol: f64 },
}

/// Sparse Cholesky of `P A P^T`, `P` the reverse Cuthill–McKee permutation.
#[derive(Debug, Clone)]
pub struct DirectSolver {
    perm: Vec<usize>,
    chol: CscCholesky<f64>,
}

impl DirectSolver {
    pub fn new(a: &CsrMatrix<f64>) -> Result<Self> {
        let perm = reverse_cuthill_mckee(a);
        let pa = CscMatrix::from(&permute_symmetric(a, &perm));
        let chol = CscCholesky::factor(&pa).map_err(|_| Error::NotPositiveDefinite {
            what: "system matrix",
            pivot: 0,
        })?;
        Ok(DirectSolver { perm, chol })
    }

    pub fn factor_nnz(&self) -> usize {
        self.chol.l().nnz()
    }

    pub fn solve(&self, b: &DVector<f64>) -> DVector<f64> {
        let pb = DVector::from_fn(b.len(), |i, _| b[self.perm[i]]);
        let y = self.chol.solve(&pb);
        let mut x = DVector::zeros(b.len());
        for (i, &p) in self.perm.iter().enumerate() {
            x[p] = y[(i, 0)];
        }
        x
    }
}

#[derive(Debug, Clone)]
pub struct CgOutcome {
    pub x: DVector<f64>,
    pub iterations: usize,
    /// `||b - A x|| / ||b||`.
    pub residual: f64,
}

/// Preconditioned conjugate gradients from the initial guess `x0`.
pub fn pcg(
    a: &CsrMatrix<f64>,
    b: &DVector<f64>,
    x0: &DVector<f64>,
    m: &IncompleteCholesky,
    tol: f64,
    max_iter: usize,
) -> Result<CgOutcome> {
    let n = b.len();
    let bnorm = b.norm();
    if bnorm == 0.0 {
        return Ok(CgOutcome {
            x: DVector::zeros(n),
            iterations: 0,
            residual: 0.0,
        });
    }
    let mut x = x0.clone();
    let mut r = vec![0.0; n];
    spmv(a, x.as_slice(), &mut r);
    for (ri, bi) in r.iter_mut().zip(b.iter()) {
        *ri = bi - *ri;
    }
    let mut z = vec![0.0; n];
    m.apply(&r, &mut z);
    let mut p = z.clone();
    let mut ap = vec![0.0; n];
    let mut rz: f64 = dot(&r, &z);
    let mut res = dot(&r, &r).sqrt() / bnorm;
    let mut it = 0;
    while res > tol && it < max_iter {
        spmv(a, &p, &mut ap);
        let alpha = rz / dot(&p, &ap);
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        res = dot(&r, &r).sqrt() / bnorm;
        it += 1;
        if res <= tol {
            break;
        }
        m.apply(&r, &mut z);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    if res > tol {
        return Err(Error::LinearSolve {
            residual: res,
            iterations: it,
        });
    }
    Ok(CgOutcome {
        x,
        iterations: it,
        residual: res,
    })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Reusable solver for one SPD matrix.
#[derive(Debug, Clone)]
pub enum SpdSolver {
    Direct(DirectSolver),
    Iterative {
        matrix: CsrMatrix<f64>,
        preconditioner: IncompleteCholesky,
        tol: f64,
        max_iter: usize,
    },
}

impl SpdSolver {
    pub fn new(a: &CsrMatrix<f64>, mode: LinearSolveMode) -> Result<Self> {
        Ok(match mode {
            LinearSolveMode::Direct => SpdSolver::Direct(DirectSolver::new(a)?),
            LinearSolveMode::Iterative { tol } => SpdSolver::Iterative {
                matrix: a.clone(),
                preconditioner: IncompleteCholesky::new(a, ICT_DROP_TOLERANCE)?,
                tol,
                max_iter: 10 * a.nrows().max(100),
            },
        })
    }

    /// Solves `A x = b`; `guess` seeds the iterative mode.
    pub fn solve(&self, b: &DVector<f64>, guess: Option<&DVector<f64>>) -> Result<DVector<f64>> {
        match self {
            SpdSolver::Direct(d) => Ok(d.solve(b)),
            SpdSolver::Iterative {
                matrix,
                preconditioner,
                tol,
                max_iter,
            } => {
                let zero;
                let x0 = match guess {
                    Some(g) => g,
                    None => {
                        zero = DVector::zeros(b.len());
                        &zero
                    }
                };
                Ok(pcg(matrix, b, x0, preconditioner, *tol, *max_iter)?.x)
            }
        }
    }
}

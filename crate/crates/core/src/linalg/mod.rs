//! Sparse symmetric matrices and the solvers used by the time stepper: a
//! Cholesky factorization after reverse Cuthill–McKee reordering, and
//! conjugate gradients with a threshold incomplete Cholesky preconditioner.

mod ict;
mod ordering;
mod solver;

use nalgebra::DVector;
use nalgebra_sparse::{CooMatrix, CsrMatrix};
use rayon::prelude::*;

pub use ict::IncompleteCholesky;
pub use ordering::{bandwidth, permute_symmetric, reverse_cuthill_mckee};
pub use solver::{pcg, CgOutcome, DirectSolver, LinearSolveMode, SpdSolver, ICT_DROP_TOLERANCE};

/// Rows per task in parallel products.
const PAR_CHUNK: usize = 4096;

/// Sums duplicate `(row, col, value)` triplets into a square CSR matrix.
pub fn from_triplets(n: usize, rows: &[usize], cols: &[usize], values: &[f64]) -> CsrMatrix<f64> {
    let coo = CooMatrix::try_from_triplets(n, n, rows.to_vec(), cols.to_vec(), values.to_vec())
        .expect("triplet indices inside the matrix");
    CsrMatrix::from(&coo)
}

/// `y = a x`. Rows are independent, so the result does not depend on the
/// number of threads.
pub fn spmv(a: &CsrMatrix<f64>, x: &[f64], y: &mut [f64]) {
    let (offsets, cols, vals) = (a.row_offsets(), a.col_indices(), a.values());
    let row = |i: usize| -> f64 {
        let mut s = 0.0;
        for p in offsets[i]..offsets[i + 1] {
            s += vals[p] * x[cols[p]];
        }
        s
    };
    if a.nrows() >= 2 * PAR_CHUNK && rayon::current_num_threads() > 1 {
        y.par_chunks_mut(PAR_CHUNK).enumerate().for_each(|(c, chunk)| {
            for (l, yi) in chunk.iter_mut().enumerate() {
                *yi = row(c * PAR_CHUNK + l);
            }
        });
    } else {
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = row(i);
        }
    }
}

pub fn mul(a: &CsrMatrix<f64>, x: &DVector<f64>) -> DVector<f64> {
    let mut y = DVector::zeros(a.nrows());
    spmv(a, x.as_slice(), y.as_mut_slice());
    y
}

/// `a + s b` for matrices sharing a sparsity pattern layout of any kind.
pub fn add_scaled(a: &CsrMatrix<f64>, s: f64, b: &CsrMatrix<f64>) -> CsrMatrix<f64> {
    a + &(b * s)
}

/// `max |a_ij - a_ji| / max |a_ij|`.
pub fn symmetry_defect(a: &CsrMatrix<f64>) -> f64 {
    let t = a.transpose();
    let diff = a - &t;
    let num = diff.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let den = a.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

pub fn diagonal(a: &CsrMatrix<f64>) -> Vec<f64> {
    let mut d = vec![0.0; a.nrows()];
    for (i, j, v) in a.triplet_iter() {
        if i == j {
            d[i] += *v;
        }
    }
    d
}

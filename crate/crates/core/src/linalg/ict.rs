use log::debug;
use nalgebra_sparse::CsrMatrix;

use crate::error::{Error, Result};

/// Threshold incomplete Cholesky factor `L L^T ~ A`, computed column by
/// column. Off-diagonal entries of column `j` smaller than
/// `drop_tol * ||A(j:, j)||` are discarded. On breakdown the factorization
/// is restarted for `A + alpha diag(A)` with growing `alpha`.
#[derive(Debug, Clone)]
pub struct IncompleteCholesky {
    diag: Vec<f64>,
    /// Strictly lower entries of each column, ascending row.
    cols: Vec<Vec<(usize, f64)>>,
    pub shift: f64,
}

impl IncompleteCholesky {
    pub fn new(a: &CsrMatrix<f64>, drop_tol: f64) -> Result<Self> {
        let mut alpha = 0.0;
        loop {
            match Self::factor(a, drop_tol, alpha) {
                Some(mut f) => {
                    f.shift = alpha;
                    if alpha > 0.0 {
                        debug!("incomplete Cholesky needed diagonal shift {alpha:e}");
                    }
                    return Ok(f);
                }
                None if alpha < 1.0 => alpha = if alpha == 0.0 { 1e-3 } else { alpha * 10.0 },
                None => {
                    return Err(Error::NotPositiveDefinite {
                        what: "incomplete Cholesky",
                        pivot: 0,
                    })
                }
            }
        }
    }

    fn factor(a: &CsrMatrix<f64>, drop_tol: f64, alpha: f64) -> Option<Self> {
        let n = a.nrows();
        let mut diag = vec![0.0; n];
        let mut cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        // next[j]: position in cols[j] of the first entry with row >= current column
        let mut next = vec![0usize; n];
        // rows[r]: columns whose next entry lies in row r
        let mut rows: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut w = vec![0.0; n];
        let mut mark = vec![false; n];
        let mut pattern: Vec<usize> = Vec::new();

        for k in 0..n {
            pattern.clear();
            let mut norm2 = 0.0;
            let row = a.row(k);
            for (&j, &v) in row.col_indices().iter().zip(row.values()) {
                if j < k {
                    continue;
                }
                let v = if j == k { v * (1.0 + alpha) } else { v };
                norm2 += v * v;
                if !mark[j] {
                    mark[j] = true;
                    pattern.push(j);
                }
                w[j] += v;
            }
            if !mark[k] {
                mark[k] = true;
                pattern.push(k);
            }
            let pending = std::mem::take(&mut rows[k]);
            for &j in &pending {
                let col = &cols[j];
                let p = next[j];
                let lkj = col[p].1;
                for &(r, v) in &col[p..] {
                    if !mark[r] {
                        mark[r] = true;
                        pattern.push(r);
                    }
                    w[r] -= v * lkj;
                }
                next[j] = p + 1;
                if p + 1 < col.len() {
                    rows[col[p + 1].0].push(j);
                }
            }
            let d = w[k];
            if !(d > 0.0) || !d.is_finite() {
                return None;
            }
            let lkk = d.sqrt();
            diag[k] = lkk;
            let threshold = drop_tol * norm2.sqrt();
            let mut col: Vec<(usize, f64)> = pattern
                .iter()
                .filter(|&&r| r > k)
                .map(|&r| (r, w[r] / lkk))
                .filter(|&(_, v)| v.abs() >= threshold)
                .collect();
            col.sort_unstable_by_key(|&(r, _)| r);
            for &r in &pattern {
                w[r] = 0.0;
                mark[r] = false;
            }
            drop(pending);
            if let Some(&(r, _)) = col.first() {
                rows[r].push(k);
            }
            cols[k] = col;
        }
        Some(IncompleteCholesky { diag, cols, shift: alpha })
    }

    pub fn nnz(&self) -> usize {
        self.diag.len() + self.cols.iter().map(Vec::len).sum::<usize>()
    }

    /// `z = (L L^T)^{-1} r`.
    pub fn apply(&self, r: &[f64], z: &mut [f64]) {
        z.copy_from_slice(r);
        for k in 0..z.len() {
            z[k] /= self.diag[k];
            let zk = z[k];
            for &(i, v) in &self.cols[k] {
                z[i] -= v * zk;
            }
        }
        for k in (0..z.len()).rev() {
            let mut s = z[k];
            for &(i, v) in &self.cols[k] {
                s -= v * z[i];
            }
            z[k] = s / self.diag[k];
        }
    }
}

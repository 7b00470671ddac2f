use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fixtures::MeshFamily;
use crate::timestep::Splitting;

/// Column order of the convergence CSV.
pub const CSV_COLUMNS: [&str; 9] = [
    "level",
    "h",
    "tau",
    "dofs",
    "l2_error",
    "eoc",
    "t_linear_s",
    "t_nonlinear_s",
    "t_total_s",
];

/// One refinement. A failed run keeps `l2_error = NaN` and its message in
/// `failure`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub level: usize,
    pub h: f64,
    pub tau: f64,
    pub dofs: usize,
    pub l2_error: f64,
    /// Rate against the previous row; `None` on the first row.
    pub eoc: Option<f64>,
    pub t_linear_s: f64,
    pub t_nonlinear_s: f64,
    pub t_total_s: f64,
    #[serde(skip)]
    pub failure: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RefinementMode {
    /// Refine `h`, `tau` coupled to it.
    Space,
    /// Finest mesh, halve `tau`.
    Time,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub family: MeshFamily,
    pub k: usize,
    pub mode: RefinementMode,
    pub variant: Splitting,
    /// `c` of `tau = c h^{(k+1)/2}` in space mode.
    pub tau_constant: Option<f64>,
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceReport {
    /// Refinement parameter of each row: `h` or `tau`.
    pub fn abscissae(&self) -> Vec<f64> {
        self.rows
            .iter()
            .map(|r| match self.mode {
                RefinementMode::Space => r.h,
                RefinementMode::Time => r.tau,
            })
            .collect()
    }

    pub fn errors(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.l2_error).collect()
    }

    /// Fills `eoc` between consecutive rows.
    pub fn compute_rates(&mut self) {
        let x = self.abscissae();
        let e = self.errors();
        for (i, row) in self.rows.iter_mut().enumerate() {
            row.eoc = (i > 0).then(|| eoc(x[i - 1], x[i], e[i - 1], e[i]));
        }
    }

    /// Least-squares slope of `log e` against `log h` (or `log tau`) over the
    /// successful rows.
    pub fn fitted_rate(&self) -> Option<f64> {
        let (x, e): (Vec<f64>, Vec<f64>) = self
            .abscissae()
            .into_iter()
            .zip(self.errors())
            .filter(|(_, e)| e.is_finite() && *e > 0.0)
            .unzip();
        least_squares_rate(&x, &e)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        write_rows(&self.rows, out)
    }

    pub fn export_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let file = std::fs::File::create(path)?;
        self.write_csv(std::io::BufWriter::new(file))
    }
}

/// `log(e0 / e1) / log(x0 / x1)`.
pub fn eoc(x0: f64, x1: f64, e0: f64, e1: f64) -> f64 {
    (e0 / e1).ln() / (x0 / x1).ln()
}

/// Slope of the least-squares line through `(log x_i, log e_i)`.
pub fn least_squares_rate(x: &[f64], e: &[f64]) -> Option<f64> {
    if x.len() != e.len() || x.len() < 2 {
        return None;
    }
    let n = x.len() as f64;
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let le: Vec<f64> = e.iter().map(|v| v.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let me = le.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    if !(sxx > 0.0) {
        return None;
    }
    let sxe: f64 = lx.iter().zip(&le).map(|(a, b)| (a - mx) * (b - me)).sum();
    Some(sxe / sxx)
}

pub fn write_rows<W: Write>(rows: &[ConvergenceRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_COLUMNS)?;
    for r in rows {
        w.write_record([
            r.level.to_string(),
            r.h.to_string(),
            r.tau.to_string(),
            r.dofs.to_string(),
            r.l2_error.to_string(),
            r.eoc.map_or(String::new(), |v| v.to_string()),
            r.t_linear_s.to_string(),
            r.t_nonlinear_s.to_string(),
            r.t_total_s.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_rows<R: Read>(input: R) -> Result<Vec<ConvergenceRow>> {
    let mut r = csv::Reader::from_reader(input);
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header != CSV_COLUMNS {
        return Err(Error::InvalidArgument(format!("unexpected CSV header {header:?}")));
    }
    let mut rows = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec?;
        let bad = |col: &str| Error::InvalidArgument(format!("row {}: bad {col}", line + 1));
        let num = |i: usize| rec[i].parse::<f64>().map_err(|_| bad(CSV_COLUMNS[i]));
        let int = |i: usize| rec[i].parse::<usize>().map_err(|_| bad(CSV_COLUMNS[i]));
        rows.push(ConvergenceRow {
            level: int(0)?,
            h: num(1)?,
            tau: num(2)?,
            dofs: int(3)?,
            l2_error: num(4)?,
            eoc: if rec[5].is_empty() { None } else { Some(num(5)?) },
            t_linear_s: num(6)?,
            t_nonlinear_s: num(7)?,
            t_total_s: num(8)?,
            failure: None,
        });
    }
    Ok(rows)
}

pub fn import_csv(path: impl AsRef<Path>) -> Result<Vec<ConvergenceRow>> {
    read_rows(std::fs::File::open(path)?)
}

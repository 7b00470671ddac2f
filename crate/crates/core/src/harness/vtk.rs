//! Legacy ASCII VTK output. Every cell gets its own copy of its vertices so
//! the piecewise polynomial `Pi_0 u_h` can jump across edges.

use std::io::Write;
use std::path::Path;

use nalgebra::DVector;

use crate::assembly::Discretization;
use crate::error::{Error, Result};

/// Polygon cell type of the legacy format.
const VTK_POLYGON: u8 = 7;

/// Mean of `Pi_0 u_h` over each cell.
pub fn cell_averages(disc: &Discretization, u: &DVector<f64>) -> Vec<f64> {
    (0..disc.mesh.num_cells())
        .map(|c| {
            let el = &disc.elements[c].element;
            let v = disc.cell_values(c, u);
            v.iter().zip(&el.rule.weights).map(|(x, w)| x * w).sum::<f64>() / el.area
        })
        .collect()
}

pub fn write_vtk<W: Write>(disc: &Discretization, u: &DVector<f64>, title: &str, mut out: W) -> Result<()> {
    if u.len() != disc.len() {
        return Err(Error::InvalidArgument(format!(
            "state has {} entries, the discretization {}",
            u.len(),
            disc.len()
        )));
    }
    let mesh = &disc.mesh;
    let corners: usize = mesh.cells().iter().map(Vec::len).sum();
    let title: String = title.chars().filter(|c| *c != '\n').take(255).collect();
    writeln!(out, "# vtk DataFile Version 3.0")?;
    writeln!(out, "{title}")?;
    writeln!(out, "ASCII")?;
    writeln!(out, "DATASET UNSTRUCTURED_GRID")?;
    writeln!(out, "POINTS {corners} double")?;
    let mut values = Vec::with_capacity(corners);
    for c in 0..mesh.num_cells() {
        for p in mesh.cell_points(c) {
            writeln!(out, "{:e} {:e} 0", p.x, p.y)?;
            values.push(disc.eval_in_cell(c, u, p));
        }
    }
    writeln!(out, "CELLS {} {}", mesh.num_cells(), corners + mesh.num_cells())?;
    let mut next = 0;
    for cell in mesh.cells() {
        write!(out, "{}", cell.len())?;
        for _ in cell {
            write!(out, " {next}")?;
            next += 1;
        }
        writeln!(out)?;
    }
    writeln!(out, "CELL_TYPES {}", mesh.num_cells())?;
    for _ in 0..mesh.num_cells() {
        writeln!(out, "{VTK_POLYGON}")?;
    }
    writeln!(out, "POINT_DATA {corners}")?;
    writeln!(out, "SCALARS pi0_u double 1")?;
    writeln!(out, "LOOKUP_TABLE default")?;
    for v in values {
        writeln!(out, "{v:e}")?;
    }
    writeln!(out, "CELL_DATA {}", mesh.num_cells())?;
    writeln!(out, "SCALARS cell_average double 1")?;
    writeln!(out, "LOOKUP_TABLE default")?;
    for v in cell_averages(disc, u) {
        writeln!(out, "{v:e}")?;
    }
    Ok(())
}

pub fn export_vtk(disc: &Discretization, u: &DVector<f64>, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path)?;
    let mut w = std::io::BufWriter::new(file);
    write_vtk(disc, u, &format!("svem k={}", disc.k()), &mut w)?;
    w.flush()?;
    Ok(())
}

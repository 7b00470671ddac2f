use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::assembly::{build_dof_map, dof_count};
use crate::error::{Error, Result};
use crate::mesh::{EtaStrategy, PolygonalMesh};
use crate::projectors::SpaceKind;

/// Global DoF counts of one mesh at one degree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DofRow {
    pub mesh: String,
    pub cells: usize,
    pub k: usize,
    pub serendipity: usize,
    pub enhanced: usize,
    pub ratio: f64,
    /// Cells with `k >= eta_E`, which need moment DoFs.
    pub deficient_cells: usize,
    /// `DofMap.total` equals the closed form; `None` when the numbering
    /// could not be built (non-convex deficient cells).
    pub numbering_matches: Option<bool>,
}

impl DofRow {
    pub fn deficient(&self) -> bool {
        self.deficient_cells > 0
    }
}

/// S-VEM against enhanced-VEM counts for every mesh and `k` in `k_range`.
pub fn dof_report(
    meshes: &[(String, PolygonalMesh)],
    k_range: std::ops::RangeInclusive<usize>,
    eta: &EtaStrategy,
) -> Result<Vec<DofRow>> {
    if k_range.is_empty() || *k_range.start() < 1 || *k_range.end() > 6 {
        return Err(Error::InvalidArgument(format!("k range {k_range:?} not within 1..=6")));
    }
    let mut rows = Vec::new();
    for (name, mesh) in meshes {
        let etas: Vec<usize> = (0..mesh.num_cells())
            .map(|c| crate::mesh::compute_eta(&mesh.cell_points(c), eta))
            .collect();
        for k in k_range.clone() {
            let serendipity = dof_count(mesh, k, eta, SpaceKind::Serendipity);
            let enhanced = dof_count(mesh, k, eta, SpaceKind::Enhanced);
            let numbering_matches = match build_dof_map(mesh, k, eta, SpaceKind::Serendipity) {
                Ok(map) => Some(map.total == serendipity),
                Err(Error::Unsupported { .. }) => None,
                Err(e) => return Err(e),
            };
            rows.push(DofRow {
                mesh: name.clone(),
                cells: mesh.num_cells(),
                k,
                serendipity,
                enhanced,
                ratio: serendipity as f64 / enhanced as f64,
                deficient_cells: etas.iter().filter(|&&e| k >= e).count(),
                numbering_matches,
            });
        }
    }
    Ok(rows)
}

/// Fixed-width table; deficient configurations carry a `*`.
pub fn write_dof_table<W: Write>(rows: &[DofRow], mut out: W) -> Result<()> {
    writeln!(out, "{:<16} {:>6} {:>2} {:>9} {:>9} {:>7}", "mesh", "cells", "k", "S-VEM", "enhanced", "ratio")?;
    for r in rows {
        let flag = if r.deficient() { "*" } else { "" };
        writeln!(
            out,
            "{:<16} {:>6} {:>2} {:>9} {:>9} {:>7.4}{flag}",
            r.mesh, r.cells, r.k, r.serendipity, r.enhanced, r.ratio
        )?;
    }
    Ok(())
}

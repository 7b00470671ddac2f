//! Polygonal meshes of planar domains.
//!
//! A [`PolygonalMesh`] owns vertex coordinates and counter-clockwise cells and
//! derives the unique edge list with incidence information. Construction
//! validates orientation, simplicity and conformity; once built the mesh is
//! immutable.

mod eta;
mod generate;
mod geometry;
mod io;

use std::collections::HashMap;

use log::warn;

pub use eta::{compute_eta, EtaStrategy, EtaVariant};
pub use generate::{generate_distorted_quads, generate_structured_quads};
pub use geometry::{compute_geometry, segments_intersect, signed_area, CellGeometry};
pub use io::{export_mesh, import_mesh, parse_mesh, write_mesh};

use crate::error::{Error, Result};

pub type Point = nalgebra::Vector2<f64>;

/// Unique undirected edge. `vertices` is sorted ascending; `cells` lists the
/// incident cells together with the local edge index inside each cell.
#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub vertices: [usize; 2],
    pub cells: Vec<(usize, usize)>,
}

impl Edge {
    pub fn is_boundary(&self) -> bool {
        self.cells.len() == 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundingBox {
    pub min: Point,
    pub max: Point,
}

impl BoundingBox {
    pub fn area(&self) -> f64 {
        (self.max.x - self.min.x) * (self.max.y - self.min.y)
    }
}

#[derive(Debug, Clone)]
pub struct PolygonalMesh {
    vertices: Vec<Point>,
    cells: Vec<Vec<usize>>,
    edges: Vec<Edge>,
    cell_edges: Vec<Vec<usize>>,
    geometry: Vec<CellGeometry>,
    bbox: BoundingBox,
}

impl PolygonalMesh {
    /// Builds and validates a mesh from vertex coordinates and CCW vertex cycles.
    pub fn new(vertices: Vec<Point>, cells: Vec<Vec<usize>>) -> Result<Self> {
        if vertices.is_empty() || cells.is_empty() {
            return Err(Error::InvalidArgument("mesh needs vertices and cells".into()));
        }
        let mut geometry = Vec::with_capacity(cells.len());
        for (c, cell) in cells.iter().enumerate() {
            if cell.len() < 3 {
                return Err(Error::InvalidCell {
                    cell: c,
                    reason: format!("{} vertices", cell.len()),
                });
            }
            if let Some(&v) = cell.iter().find(|&&v| v >= vertices.len()) {
                return Err(Error::InvalidCell {
                    cell: c,
                    reason: format!("vertex index {v} out of range"),
                });
            }
            let pts: Vec<Point> = cell.iter().map(|&v| vertices[v]).collect();
            let g = compute_geometry(&pts).map_err(|e| relabel(e, c))?;
            geometry.push(g);
        }

        let mut lookup: HashMap<[usize; 2], usize> = HashMap::new();
        let mut edges: Vec<Edge> = Vec::new();
        let mut cell_edges = Vec::with_capacity(cells.len());
        for (c, cell) in cells.iter().enumerate() {
            let n = cell.len();
            let mut local = Vec::with_capacity(n);
            for j in 0..n {
                let (a, b) = (cell[j], cell[(j + 1) % n]);
                let key = [a.min(b), a.max(b)];
                let id = *lookup.entry(key).or_insert_with(|| {
                    edges.push(Edge {
                        vertices: key,
                        cells: Vec::with_capacity(2),
                    });
                    edges.len() - 1
                });
                let edge = &mut edges[id];
                if let Some(&(other, lj)) = edge.cells.first() {
                    let oc = &cells[other];
                    let same_direction = oc[lj] == a;
                    if same_direction || edge.cells.len() >= 2 {
                        return Err(Error::NonConforming(format!(
                            "edge ({}, {}) shared inconsistently by cells {other} and {c}",
                            key[0], key[1]
                        )));
                    }
                }
                edge.cells.push((c, j));
                local.push(id);
            }
            cell_edges.push(local);
        }

        let mut min = vertices[0];
        let mut max = vertices[0];
        for p in &vertices {
            min = min.inf(p);
            max = max.sup(p);
        }

        let mesh = PolygonalMesh {
            vertices,
            cells,
            edges,
            cell_edges,
            geometry,
            bbox: BoundingBox { min, max },
        };
        mesh.diagnose();
        Ok(mesh)
    }

    fn diagnose(&self) {
        let worst = self
            .geometry
            .iter()
            .map(|g| g.regularity_ratio)
            .fold(f64::INFINITY, f64::min);
        if worst < 1e-3 {
            warn!("mesh contains edges shorter than 1e-3 h_E (min ratio {worst:.3e})");
        }
        let not_star = self.geometry.iter().filter(|g| !g.star_shaped_from_centroid).count();
        if not_star > 0 {
            warn!("{not_star} cells are not star-shaped with respect to their centroid");
        }
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn cells(&self) -> &[Vec<usize>] {
        &self.cells
    }

    pub fn cell(&self, c: usize) -> &[usize] {
        &self.cells[c]
    }

    pub fn cell_points(&self, c: usize) -> Vec<Point> {
        self.cells[c].iter().map(|&v| self.vertices[v]).collect()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Global edge index of local edge `j` (from vertex `j` to `j + 1`) of cell `c`.
    pub fn cell_edges(&self, c: usize) -> &[usize] {
        &self.cell_edges[c]
    }

    pub fn geometry(&self, c: usize) -> &CellGeometry {
        &self.geometry[c]
    }

    pub fn geometries(&self) -> &[CellGeometry] {
        &self.geometry
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn bounding_box(&self) -> BoundingBox {
        self.bbox
    }

    /// Mesh size `h = max h_E`.
    pub fn mesh_size(&self) -> f64 {
        self.geometry.iter().map(|g| g.diameter).fold(0.0, f64::max)
    }

    pub fn total_area(&self) -> f64 {
        self.geometry.iter().map(|g| g.area).sum()
    }

    /// True when the cells cover the bounding box (rectangular domains) to
    /// `rel_tol` in area.
    pub fn tiles_bounding_box(&self, rel_tol: f64) -> bool {
        let domain = self.bbox.area();
        ((self.total_area() - domain) / domain).abs() <= rel_tol
    }

    /// New mesh with the cells listed in `order` (a permutation of cell indices).
    pub fn with_cell_order(&self, order: &[usize]) -> Result<Self> {
        let cells = order.iter().map(|&c| self.cells[c].clone()).collect();
        PolygonalMesh::new(self.vertices.clone(), cells)
    }
}

fn relabel(err: Error, cell: usize) -> Error {
    match err {
        Error::InvalidCell { reason, .. } => Error::InvalidCell { cell, reason },
        Error::Orientation { signed_area, .. } => Error::Orientation { cell, signed_area },
        Error::NonSimple { first, second, .. } => Error::NonSimple {
            cell,
            first,
            second,
        },
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> Vec<Point> {
        vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(1.0, 1.0),
            Point::new(0.0, 1.0),
        ]
    }

    #[test]
    fn single_square() {
        let m = PolygonalMesh::new(square(), vec![vec![0, 1, 2, 3]]).unwrap();
        assert_eq!(m.num_edges(), 4);
        assert!(m.edges().iter().all(Edge::is_boundary));
        assert!(m.tiles_bounding_box(1e-12));
    }

    #[test]
    fn two_cells_share_an_edge() {
        let mut v = square();
        v.push(Point::new(2.0, 0.0));
        v.push(Point::new(2.0, 1.0));
        let m = PolygonalMesh::new(v, vec![vec![0, 1, 2, 3], vec![1, 4, 5, 2]]).unwrap();
        assert_eq!(m.num_edges(), 7);
        let interior: Vec<_> = m.edges().iter().filter(|e| !e.is_boundary()).collect();
        assert_eq!(interior.len(), 1);
        assert_eq!(interior[0].vertices, [1, 2]);
    }

    #[test]
    fn overlapping_cells_are_rejected() {
        let m = PolygonalMesh::new(square(), vec![vec![0, 1, 2, 3], vec![0, 1, 2, 3]]);
        assert!(matches!(m, Err(Error::NonConforming(_))));
    }

    #[test]
    fn clockwise_cell_is_rejected() {
        let m = PolygonalMesh::new(square(), vec![vec![0, 3, 2, 1]]);
        assert!(matches!(m, Err(Error::Orientation { cell: 0, .. })));
    }
}

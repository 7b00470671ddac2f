use serde::{Deserialize, Serialize};

use crate::polyspace::poly_dim_signed;

/// Which moments a cell keeps as DoFs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpaceKind {
    /// `r_{k - eta}` moments when `k >= eta`, none otherwise.
    Serendipity,
    /// Moments up to degree `k - 2` on every cell.
    Enhanced,
}

/// Local numbering on an `N`-gon: vertex values, then `k - 1` Gauss–Lobatto
/// values per edge (edge `j` runs from vertex `j` to `j + 1`), then moments.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LocalDofLayout {
    pub k: usize,
    pub n_vertices: usize,
    pub n_moments: usize,
    pub eta: usize,
    pub kind: SpaceKind,
}

impl LocalDofLayout {
    pub fn new(k: usize, n_vertices: usize, eta: usize, kind: SpaceKind) -> Self {
        let n_moments = match kind {
            SpaceKind::Serendipity => poly_dim_signed(k as isize - eta as isize),
            SpaceKind::Enhanced => poly_dim_signed(k as isize - 2),
        };
        LocalDofLayout {
            k,
            n_vertices,
            n_moments,
            eta,
            kind,
        }
    }

    /// `k >= eta`: the boundary projector is not available.
    pub fn deficient(&self) -> bool {
        self.k >= self.eta
    }

    pub fn n_boundary(&self) -> usize {
        self.k * self.n_vertices
    }

    pub fn len(&self) -> usize {
        self.n_boundary() + self.n_moments
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn edge_node(&self, edge: usize, l: usize) -> usize {
        self.n_vertices + edge * (self.k - 1) + l
    }

    pub fn moment(&self, alpha: usize) -> usize {
        self.n_boundary() + alpha
    }

    /// Local indices of the `k + 1` Lobatto values along edge `j`, start to end.
    pub fn edge_trace(&self, j: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.k + 1);
        out.push(j);
        out.extend((0..self.k - 1).map(|l| self.edge_node(j, l)));
        out.push((j + 1) % self.n_vertices);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        let ideal = LocalDofLayout::new(3, 4, 4, SpaceKind::Serendipity);
        assert_eq!((ideal.len(), ideal.n_moments, ideal.deficient()), (12, 0, false));
        let sq4 = LocalDofLayout::new(4, 4, 4, SpaceKind::Serendipity);
        assert_eq!((sq4.len(), sq4.n_moments, sq4.deficient()), (17, 1, true));
        let sq6 = LocalDofLayout::new(6, 4, 4, SpaceKind::Serendipity);
        assert_eq!(sq6.n_moments, 6);
        let enh = LocalDofLayout::new(2, 4, 4, SpaceKind::Enhanced);
        assert_eq!(enh.len(), 9);
        assert_eq!(LocalDofLayout::new(1, 5, 5, SpaceKind::Enhanced).n_moments, 0);
    }

    #[test]
    fn traces_wrap_around() {
        let l = LocalDofLayout::new(3, 4, 4, SpaceKind::Serendipity);
        assert_eq!(l.edge_trace(0), vec![0, 4, 5, 1]);
        assert_eq!(l.edge_trace(3), vec![3, 10, 11, 0]);
    }
}

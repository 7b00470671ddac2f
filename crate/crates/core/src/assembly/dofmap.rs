use crate::error::{Error, Result};
use crate::mesh::{compute_eta, EtaStrategy, Point, PolygonalMesh};
use crate::polyspace::{poly_dim_signed, EdgeRule};
use crate::projectors::{LocalDofLayout, SpaceKind};

/// Global numbering: vertex values, then `k - 1` Gauss–Lobatto values per
/// edge (edges sorted by their endpoint pair, nodes running from the lower
/// to the higher vertex index), then the moments of each cell that keeps any.
#[derive(Debug, Clone)]
pub struct DofMap {
    pub k: usize,
    pub kind: SpaceKind,
    pub n_vertices: usize,
    pub n_edges: usize,
    /// Vertex and edge DoFs.
    pub n_boundary: usize,
    pub total: usize,
    pub eta: Vec<usize>,
    /// First global index of each edge's interior nodes.
    pub edge_start: Vec<usize>,
    pub moment_start: Vec<usize>,
    pub moment_count: Vec<usize>,
    /// Coordinates of the vertex and edge DoFs.
    pub nodes: Vec<Point>,
    gather: Vec<Vec<usize>>,
}

impl DofMap {
    pub fn cell_dofs(&self, c: usize) -> &[usize] {
        &self.gather[c]
    }

    pub fn num_cells(&self) -> usize {
        self.gather.len()
    }

    pub fn layout(&self, c: usize) -> LocalDofLayout {
        let n = (self.gather[c].len() - self.moment_count[c]) / self.k;
        LocalDofLayout::new(self.k, n, self.eta[c], self.kind)
    }

    pub fn moments(&self, c: usize) -> std::ops::Range<usize> {
        self.moment_start[c]..self.moment_start[c] + self.moment_count[c]
    }

    pub fn is_boundary_dof(&self, i: usize) -> bool {
        i < self.n_boundary
    }

    /// Cells that carry moment DoFs.
    pub fn cells_with_moments(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.gather.len()).filter(|&c| self.moment_count[c] > 0)
    }
}

/// Builds the global numbering for degree `k`. Serendipity cells with
/// `k >= eta_E` must be convex.
pub fn build_dof_map(mesh: &PolygonalMesh, k: usize, strategy: &EtaStrategy, kind: SpaceKind) -> Result<DofMap> {
    if k == 0 {
        return Err(Error::InvalidArgument("degree k must be >= 1".into()));
    }
    strategy.validate()?;
    let rule = EdgeRule::new(k)?;
    let nv = mesh.num_vertices();
    let ne = mesh.num_edges();

    let mut sorted: Vec<usize> = (0..ne).collect();
    sorted.sort_by_key(|&e| mesh.edges()[e].vertices);
    let mut edge_start = vec![0; ne];
    let mut nodes: Vec<Point> = mesh.vertices().to_vec();
    for (rank, &e) in sorted.iter().enumerate() {
        edge_start[e] = nv + rank * (k - 1);
    }
    nodes.resize(nv + ne * (k - 1), Point::zeros());
    for (e, edge) in mesh.edges().iter().enumerate() {
        let (a, b) = (mesh.vertices()[edge.vertices[0]], mesh.vertices()[edge.vertices[1]]);
        for (l, &s) in rule.lobatto_nodes[1..k].iter().enumerate() {
            nodes[edge_start[e] + l] = a + (b - a) * (0.5 * (s + 1.0));
        }
    }
    let n_boundary = nv + ne * (k - 1);

    let mut eta = Vec::with_capacity(mesh.num_cells());
    let mut moment_start = Vec::with_capacity(mesh.num_cells());
    let mut moment_count = Vec::with_capacity(mesh.num_cells());
    let mut next = n_boundary;
    for c in 0..mesh.num_cells() {
        let points = mesh.cell_points(c);
        let eta_c = compute_eta(&points, strategy);
        let n_m = match kind {
            SpaceKind::Serendipity => poly_dim_signed(k as isize - eta_c as isize),
            SpaceKind::Enhanced => poly_dim_signed(k as isize - 2),
        };
        if kind == SpaceKind::Serendipity && k >= eta_c && !mesh.geometry(c).convex {
            return Err(Error::Unsupported {
                cell: c,
                message: format!("non-convex cell with k = {k} >= eta = {eta_c}"),
            });
        }
        eta.push(eta_c);
        moment_start.push(next);
        moment_count.push(n_m);
        next += n_m;
    }

    let mut gather = Vec::with_capacity(mesh.num_cells());
    for c in 0..mesh.num_cells() {
        let cell = mesh.cell(c);
        let n = cell.len();
        let mut g = Vec::with_capacity(k * n + moment_count[c]);
        g.extend_from_slice(cell);
        for (j, &e) in mesh.cell_edges(c).iter().enumerate() {
            let forward = cell[j] < cell[(j + 1) % n];
            for l in 0..k - 1 {
                let slot = if forward { l } else { k - 2 - l };
                g.push(edge_start[e] + slot);
            }
        }
        g.extend(moment_start[c]..moment_start[c] + moment_count[c]);
        gather.push(g);
    }

    Ok(DofMap {
        k,
        kind,
        n_vertices: nv,
        n_edges: ne,
        n_boundary,
        total: next,
        eta,
        edge_start,
        moment_start,
        moment_count,
        nodes,
        gather,
    })
}

/// Closed-form global counts: `#V + (k - 1) #E` plus the moments,
/// `r_{k - eta_E}` per cell for the serendipity space and `r_{k - 2}` for the
/// enhanced space.
pub fn dof_count(mesh: &PolygonalMesh, k: usize, strategy: &EtaStrategy, kind: SpaceKind) -> usize {
    let boundary = mesh.num_vertices() + (k - 1) * mesh.num_edges();
    let moments: usize = (0..mesh.num_cells())
        .map(|c| match kind {
            SpaceKind::Serendipity => poly_dim_signed(k as isize - compute_eta(&mesh.cell_points(c), strategy) as isize),
            SpaceKind::Enhanced => poly_dim_signed(k as isize - 2),
        })
        .sum();
    boundary + moments
}

use nalgebra::DVector;
use nalgebra_sparse::CsrMatrix;
use rayon::prelude::*;

use super::dofmap::{build_dof_map, DofMap};
use crate::error::{Error, Result};
use crate::linalg::from_triplets;
use crate::mesh::{EtaStrategy, Point, PolygonalMesh};
use crate::polyspace::{EdgeRule, TriangleRule};
use crate::projectors::{default_quadrature_degree, Element, ElementOperators, SpaceKind};

/// Global coefficient vector of a discrete function at time `time`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    pub values: DVector<f64>,
    pub time: f64,
}

impl StateVector {
    pub fn new(values: DVector<f64>, time: f64) -> Self {
        StateVector { values, time }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }
}

/// Mesh, numbering, per-cell operators and the assembled global matrices.
#[derive(Debug, Clone)]
pub struct Discretization {
    pub mesh: PolygonalMesh,
    pub dofs: DofMap,
    pub elements: Vec<ElementOperators>,
    pub mass: CsrMatrix<f64>,
    /// Stiffness for unit diffusion.
    pub stiffness: CsrMatrix<f64>,
}

/// Operators of every cell, built concurrently.
pub fn build_elements(mesh: &PolygonalMesh, dofs: &DofMap) -> Result<Vec<ElementOperators>> {
    let k = dofs.k;
    let edge = EdgeRule::new(k)?;
    let quad = TriangleRule::new(default_quadrature_degree(k));
    (0..mesh.num_cells())
        .into_par_iter()
        .map(|c| {
            let points = mesh.cell_points(c);
            let el = Element::new(c, &points, mesh.geometry(c), k, &edge, &quad)?;
            let ops = el.operators(dofs.eta[c], dofs.kind)?;
            if ops.len() != dofs.cell_dofs(c).len() {
                return Err(Error::Internal(format!("cell {c}: local and global DoF counts differ")));
            }
            Ok(ops)
        })
        .collect()
}

/// Scatter-adds the local matrices in cell order; returns `(M, A)` with `A`
/// for unit diffusion.
pub fn assemble(dofs: &DofMap, elements: &[ElementOperators]) -> Result<(CsrMatrix<f64>, CsrMatrix<f64>)> {
    let nnz: usize = elements.iter().map(|e| e.len() * e.len()).sum();
    let (mut rows, mut cols) = (Vec::with_capacity(nnz), Vec::with_capacity(nnz));
    let (mut m, mut a) = (Vec::with_capacity(nnz), Vec::with_capacity(nnz));
    for (c, el) in elements.iter().enumerate() {
        let g = dofs.cell_dofs(c);
        if g.len() != el.len() || g.iter().any(|&i| i >= dofs.total) {
            return Err(Error::Internal(format!("cell {c}: inconsistent gather list")));
        }
        for (i, &gi) in g.iter().enumerate() {
            for (j, &gj) in g.iter().enumerate() {
                rows.push(gi);
                cols.push(gj);
                m.push(el.mass[(i, j)]);
                a.push(el.stiffness[(i, j)]);
            }
        }
    }
    Ok((
        from_triplets(dofs.total, &rows, &cols, &m),
        from_triplets(dofs.total, &rows, &cols, &a),
    ))
}

impl Discretization {
    pub fn new(mesh: PolygonalMesh, k: usize, strategy: &EtaStrategy, kind: SpaceKind) -> Result<Self> {
        let dofs = build_dof_map(&mesh, k, strategy, kind)?;
        let elements = build_elements(&mesh, &dofs)?;
        let (mass, stiffness) = assemble(&dofs, &elements)?;
        Ok(Discretization {
            mesh,
            dofs,
            elements,
            mass,
            stiffness,
        })
    }

    pub fn k(&self) -> usize {
        self.dofs.k
    }

    pub fn len(&self) -> usize {
        self.dofs.total
    }

    pub fn is_empty(&self) -> bool {
        self.dofs.total == 0
    }

    /// `eps A`.
    pub fn stiffness_matrix(&self, eps: f64) -> CsrMatrix<f64> {
        &self.stiffness * eps
    }

    pub fn gather(&self, c: usize, u: &DVector<f64>) -> DVector<f64> {
        DVector::from_iterator(self.dofs.cell_dofs(c).len(), self.dofs.cell_dofs(c).iter().map(|&i| u[i]))
    }

    /// Monomial coefficients of `Pi_0 u_h` on cell `c`.
    pub fn pi_zero(&self, c: usize, u: &DVector<f64>) -> DVector<f64> {
        &self.elements[c].pi_zero * self.gather(c, u)
    }

    /// `Pi_0 u_h` at the quadrature points of cell `c`.
    pub fn cell_values(&self, c: usize, u: &DVector<f64>) -> DVector<f64> {
        &self.elements[c].phi * self.gather(c, u)
    }

    /// Evaluates `Pi_0 u_h` of cell `c` at an arbitrary point.
    pub fn eval_in_cell(&self, c: usize, u: &DVector<f64>, p: Point) -> f64 {
        let coef = self.pi_zero(c, u);
        self.elements[c].element.basis.eval_poly(coef.as_slice(), p)
    }

    /// Point values at the boundary nodes, cell moments by quadrature.
    pub fn interpolate(&self, g: impl Fn(Point) -> f64 + Sync) -> DVector<f64> {
        let mut u = DVector::zeros(self.dofs.total);
        for (i, p) in self.dofs.nodes.iter().enumerate() {
            u[i] = g(*p);
        }
        let moments: Vec<(usize, Vec<f64>)> = self
            .dofs
            .cells_with_moments()
            .collect::<Vec<_>>()
            .into_par_iter()
            .map(|c| (c, self.elements[c].element.moments(&g, self.dofs.moment_count[c])))
            .collect();
        for (c, mu) in moments {
            for (i, v) in self.dofs.moments(c).zip(mu) {
                u[i] = v;
            }
        }
        u
    }

    pub fn interpolate_state(&self, g: impl Fn(Point) -> f64 + Sync, time: f64) -> StateVector {
        StateVector::new(self.interpolate(g), time)
    }

    /// DoF vector of the constant one.
    pub fn constants(&self) -> DVector<f64> {
        self.interpolate(|_| 1.0)
    }

    /// Moments `(1/|E|) \int_E f(Pi_0 u_h) m_a` of cell `c`, `a < count`.
    pub fn cell_reaction_moments(&self, c: usize, u: &DVector<f64>, f: impl Fn(f64) -> f64, count: usize) -> Vec<f64> {
        let el = &self.elements[c].element;
        let vals = self.cell_values(c, u);
        let mut out = vec![0.0; count];
        for (q, &w) in el.rule.weights.iter().enumerate() {
            let fw = w * f(vals[q]);
            for (a, o) in out.iter_mut().enumerate() {
                *o += fw * el.values[(q, a)];
            }
        }
        for o in &mut out {
            *o /= el.area;
        }
        out
    }

    /// Interpolatory DoF vector of `f(u_h)`: `f(U_i)` at boundary DoFs and
    /// the moments of `f(Pi_0 u_h)` at moment DoFs.
    pub fn nonlinear_dof_vector(&self, u: &DVector<f64>, f: impl Fn(f64) -> f64 + Sync) -> Result<DVector<f64>> {
        let mut out = DVector::zeros(u.len());
        for i in 0..self.dofs.n_boundary {
            let v = f(u[i]);
            if !v.is_finite() {
                return Err(Error::FunctionDomain { dof: i, value: u[i] });
            }
            out[i] = v;
        }
        let cells: Vec<usize> = self.dofs.cells_with_moments().collect();
        let moments: Vec<Vec<f64>> = cells
            .par_iter()
            .map(|&c| self.cell_reaction_moments(c, u, &f, self.dofs.moment_count[c]))
            .collect();
        for (&c, mu) in cells.iter().zip(moments) {
            for (i, v) in self.dofs.moments(c).zip(mu) {
                if !v.is_finite() {
                    return Err(Error::FunctionDomain { dof: i, value: u[i] });
                }
                out[i] = v;
            }
        }
        Ok(out)
    }

    /// `(\sum_E \int_E (exact - Pi_0 u_h)^2)^{1/2}`.
    pub fn l2_error(&self, u: &DVector<f64>, exact: impl Fn(Point) -> f64 + Sync) -> f64 {
        (0..self.elements.len())
            .into_par_iter()
            .map(|c| {
                let el = &self.elements[c].element;
                let vals = self.cell_values(c, u);
                el.rule
                    .points
                    .iter()
                    .zip(&el.rule.weights)
                    .zip(vals.iter())
                    .map(|((p, w), v)| w * (exact(*p) - v).powi(2))
                    .sum::<f64>()
            })
            .collect::<Vec<f64>>()
            .iter()
            .sum::<f64>()
            .sqrt()
    }

    /// `\|Pi_0 u_h\|_{L2}`.
    pub fn l2_norm(&self, u: &DVector<f64>) -> f64 {
        self.l2_error(u, |_| 0.0)
    }
}

use nalgebra::{DMatrix, DVector};

use super::layout::{LocalDofLayout, SpaceKind};
use crate::error::{Error, Result};
use crate::mesh::{CellGeometry, Point};
use crate::polyspace::{polygon_quadrature_with, EdgeRule, PolygonRule, ScaledMonomialBasis, TriangleRule};

/// Gram systems with a larger 2-norm condition number are rejected.
pub const CONDITION_LIMIT: f64 = 1e12;

#[derive(Debug, Clone)]
struct EdgeQuad {
    points: Vec<Point>,
    /// Gauss–Legendre weights scaled by `|e| / 2`.
    weights: Vec<f64>,
    normal: Point,
}

/// Geometric and polynomial data of one cell, independent of the DoF choice.
///
/// Public matrices use scaled-monomial coefficients. Internally the
/// projectors are computed in the basis `q = m T`, `T` upper triangular with
/// `\int_E q_a q_b = |E| delta_ab`, and mapped back at the end.
#[derive(Debug, Clone)]
pub struct Element {
    pub cell: usize,
    pub k: usize,
    pub area: f64,
    pub centroid: Point,
    pub diameter: f64,
    pub convex: bool,
    pub points: Vec<Point>,
    pub basis: ScaledMonomialBasis,
    pub rule: PolygonRule,
    /// `H_ab = \int_E m_a m_b`.
    pub mass: DMatrix<f64>,
    /// `\int_E grad m_a . grad m_b`.
    pub grad_gram: DMatrix<f64>,
    /// `values[(q, b)] = m_b(x_q)` at the cell quadrature points.
    pub values: DMatrix<f64>,
    /// Monomial coefficients of the orthonormal basis (columns).
    pub to_monomial: DMatrix<f64>,
    /// `R` with `H = R^T R`; `H T = sqrt|E| R^T`.
    chol: DMatrix<f64>,
    grad_gram_q: DMatrix<f64>,
    values_q: DMatrix<f64>,
    nodes: Vec<Point>,
    edges: Vec<EdgeQuad>,
    edge_rule: EdgeRule,
}

pub fn condition_number(m: &DMatrix<f64>) -> f64 {
    let sv = m.clone().svd(false, false).singular_values;
    let max = sv.iter().cloned().fold(0.0, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if min <= 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Least-squares solution of `a x = b` by Householder QR after scaling the
/// columns of `a` to unit norm; the reported condition is that of the
/// equilibrated Gram matrix.
fn least_squares(cell: usize, what: &'static str, mut a: DMatrix<f64>, b: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let scale: Vec<f64> = a.column_iter().map(|c| c.norm()).collect();
    if scale.iter().any(|&s| !(s > 0.0)) {
        return Err(Error::Conditioning {
            cell,
            what,
            condition: f64::INFINITY,
        });
    }
    for (mut c, s) in a.column_iter_mut().zip(&scale) {
        c /= *s;
    }
    let qr = a.qr();
    let r = qr.r();
    let condition = condition_number(&r).powi(2);
    if !(condition <= CONDITION_LIMIT) {
        return Err(Error::Conditioning { cell, what, condition });
    }
    let qtb = qr.q().transpose() * b;
    let mut x = r
        .solve_upper_triangular(&qtb)
        .ok_or(Error::Conditioning { cell, what, condition })?;
    for (mut row, s) in x.row_iter_mut().zip(&scale) {
        row /= *s;
    }
    Ok(x)
}

impl Element {
    /// `quad` must come from [`TriangleRule::new`] with the desired exactness
    /// (at least `2k`).
    pub fn new(cell: usize, points: &[Point], geom: &CellGeometry, k: usize, edge_rule: &EdgeRule, quad: &TriangleRule) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidArgument("degree k must be >= 1".into()));
        }
        if edge_rule.lobatto_nodes.len() != k + 1 {
            return Err(Error::Internal(format!("edge rule does not match k = {k}")));
        }
        let basis = ScaledMonomialBasis::new(geom.centroid, geom.diameter, k);
        let rule = polygon_quadrature_with(points, geom.centroid, quad).map_err(|e| match e {
            Error::Triangulation { .. } => Error::Triangulation { cell },
            other => other,
        })?;
        let r = basis.len();
        let nq = rule.len();
        let mut values = DMatrix::zeros(nq, r);
        let mut gx = DMatrix::zeros(nq, r);
        let mut gy = DMatrix::zeros(nq, r);
        let mut row = vec![0.0; r];
        for (q, (&p, &w)) in rule.points.iter().zip(&rule.weights).enumerate() {
            basis.eval_into(p, &mut row);
            let sw = w.sqrt();
            for (b, g) in basis.grad(p).iter().enumerate() {
                values[(q, b)] = row[b];
                gx[(q, b)] = sw * g.x;
                gy[(q, b)] = sw * g.y;
            }
        }
        let weighted = DMatrix::from_fn(nq, r, |q, b| rule.weights[q].sqrt() * values[(q, b)]);
        let mut chol = weighted.qr().r();
        // fix the sign so that R has a positive diagonal
        for i in 0..r {
            if chol[(i, i)] < 0.0 {
                chol.row_mut(i).neg_mut();
            }
        }
        let degenerate = Error::Conditioning {
            cell,
            what: "monomial mass",
            condition: f64::INFINITY,
        };
        if (0..r).any(|i| !(chol[(i, i)] > 1e-14 * chol[(0, 0)])) {
            return Err(degenerate);
        }
        let mass = chol.transpose() * &chol;
        let to_monomial = chol
            .solve_upper_triangular(&DMatrix::identity(r, r))
            .ok_or(degenerate)?
            * geom.area.sqrt();
        let grad_gram = gx.transpose() * &gx + gy.transpose() * &gy;
        let (gxq, gyq) = (&gx * &to_monomial, &gy * &to_monomial);
        let grad_gram_q = gxq.transpose() * &gxq + gyq.transpose() * &gyq;
        let values_q = &values * &to_monomial;

        let n = points.len();
        let mut nodes = points.to_vec();
        let mut edges = Vec::with_capacity(n);
        for j in 0..n {
            let (a, b) = (points[j], points[(j + 1) % n]);
            let t = b - a;
            let len = t.norm();
            let at = |s: f64| a + t * (0.5 * (s + 1.0));
            edges.push(EdgeQuad {
                points: edge_rule.legendre_nodes.iter().map(|&s| at(s)).collect(),
                weights: edge_rule.legendre_weights.iter().map(|w| w * 0.5 * len).collect(),
                normal: Point::new(t.y, -t.x) / len,
            });
        }
        for j in 0..n {
            let (a, b) = (points[j], points[(j + 1) % n]);
            for &s in &edge_rule.lobatto_nodes[1..k] {
                nodes.push(a + (b - a) * (0.5 * (s + 1.0)));
            }
        }
        Ok(Element {
            cell,
            k,
            area: geom.area,
            centroid: geom.centroid,
            diameter: geom.diameter,
            convex: geom.convex,
            points: points.to_vec(),
            basis,
            rule,
            mass,
            grad_gram,
            values,
            to_monomial,
            chol,
            grad_gram_q,
            values_q,
            nodes,
            edges,
            edge_rule: edge_rule.clone(),
        })
    }

    pub fn n_vertices(&self) -> usize {
        self.points.len()
    }

    pub fn layout(&self, eta: usize, kind: SpaceKind) -> LocalDofLayout {
        LocalDofLayout::new(self.k, self.n_vertices(), eta, kind)
    }

    /// Coordinates of the `kN` boundary nodes in local DoF order.
    pub fn boundary_nodes(&self) -> &[Point] {
        &self.nodes
    }

    /// `(1 / |E|) \int_E g m_a` for `a < count`, by the cell rule.
    pub fn moments(&self, g: impl Fn(Point) -> f64, count: usize) -> Vec<f64> {
        let mut out = vec![0.0; count];
        for (q, (&p, &w)) in self.rule.points.iter().zip(&self.rule.weights).enumerate() {
            let gw = w * g(p) / self.area;
            for (a, o) in out.iter_mut().enumerate() {
                *o += gw * self.values[(q, a)];
            }
        }
        out
    }

    /// DoF values of a continuous function.
    pub fn dof_vector(&self, layout: &LocalDofLayout, g: impl Fn(Point) -> f64) -> DVector<f64> {
        let mut v = DVector::zeros(layout.len());
        for (i, &p) in self.nodes.iter().enumerate() {
            v[i] = g(p);
        }
        let m = self.moments(&g, layout.n_moments);
        for (a, val) in m.into_iter().enumerate() {
            v[layout.moment(a)] = val;
        }
        v
    }

    /// `D`: column `b` is the DoF vector of monomial `m_b`.
    pub fn monomial_dofs(&self, layout: &LocalDofLayout) -> DMatrix<f64> {
        let r = self.basis.len();
        let mut d = DMatrix::zeros(layout.len(), r);
        let mut row = vec![0.0; r];
        for (i, &p) in self.nodes.iter().enumerate() {
            self.basis.eval_into(p, &mut row);
            for b in 0..r {
                d[(i, b)] = row[b];
            }
        }
        for a in 0..layout.n_moments {
            for b in 0..r {
                d[(layout.moment(a), b)] = self.mass[(a, b)] / self.area;
            }
        }
        d
    }

    /// `(1/|E|) H T = R^T / sqrt|E|`: monomial moments of the orthonormal basis.
    fn basis_moments(&self) -> DMatrix<f64> {
        self.chol.transpose() / self.area.sqrt()
    }

    /// DoF vectors of the orthonormal basis.
    fn basis_dofs(&self, layout: &LocalDofLayout) -> DMatrix<f64> {
        let nb = layout.n_boundary();
        let r = self.basis.len();
        let mut d = DMatrix::zeros(layout.len(), r);
        let dm = self.monomial_dofs(layout);
        d.rows_mut(0, nb).copy_from(&(dm.rows(0, nb) * &self.to_monomial));
        let ht = self.basis_moments();
        for a in 0..layout.n_moments {
            d.row_mut(nb + a).copy_from(&ht.row(a));
        }
        d
    }

    /// Weighted edge samples `(V, I)`: rows are Gauss–Legendre points scaled
    /// by the square root of their weights, `V` holding the monomials and `I`
    /// the Lagrange reconstruction of the trace from the boundary DoFs. Then
    /// `V^T V = \oint m_a m_b` and `V^T I v = \oint v m_a`.
    pub fn boundary_samples(&self, layout: &LocalDofLayout) -> (DMatrix<f64>, DMatrix<f64>) {
        let r = self.basis.len();
        let nq: usize = self.edges.iter().map(|e| e.points.len()).sum();
        let mut v = DMatrix::zeros(nq, r);
        let mut interp = DMatrix::zeros(nq, layout.n_boundary());
        let mut m = vec![0.0; r];
        let mut row = 0;
        for (j, e) in self.edges.iter().enumerate() {
            let trace = layout.edge_trace(j);
            for (q, (&p, &w)) in e.points.iter().zip(&e.weights).enumerate() {
                let sw = w.sqrt();
                self.basis.eval_into(p, &mut m);
                for a in 0..r {
                    v[(row, a)] = sw * m[a];
                }
                for (l, &i) in trace.iter().enumerate() {
                    interp[(row, i)] = sw * self.edge_rule.interp[q][l];
                }
                row += 1;
            }
        }
        (v, interp)
    }

    /// `(G, B)` with `G_ab = \oint m_a m_b` and `B v = (\oint v m_a)_a`.
    pub fn boundary_gram(&self, layout: &LocalDofLayout) -> (DMatrix<f64>, DMatrix<f64>) {
        let (v, i) = self.boundary_samples(layout);
        let vt = v.transpose();
        (&vt * &v, vt * i)
    }

    fn boundary_projector_q(&self, layout: &LocalDofLayout) -> Result<DMatrix<f64>> {
        let violation = Error::ConditionViolation {
            cell: self.cell,
            k: self.k,
            eta: layout.eta,
        };
        if layout.deficient() {
            return Err(violation);
        }
        let (v, i) = self.boundary_samples(layout);
        let p = least_squares(self.cell, "boundary Gram", v * &self.to_monomial, &i).map_err(|_| violation)?;
        let mut out = DMatrix::zeros(self.basis.len(), layout.len());
        out.columns_mut(0, layout.n_boundary()).copy_from(&p);
        Ok(out)
    }

    fn serendipity_projector_q(&self, layout: &LocalDofLayout) -> Result<DMatrix<f64>> {
        if layout.deficient() && !self.convex {
            return Err(Error::Unsupported {
                cell: self.cell,
                message: format!(
                    "k = {} >= eta = {} on a non-convex cell; moment selection is only defined for convex cells",
                    self.k, layout.eta
                ),
            });
        }
        let n = layout.len();
        least_squares(self.cell, "serendipity Gram", self.basis_dofs(layout), &DMatrix::identity(n, n))
    }

    fn reconstruction_projector_q(&self, layout: &LocalDofLayout) -> Result<DMatrix<f64>> {
        if layout.deficient() {
            self.serendipity_projector_q(layout)
        } else {
            self.boundary_projector_q(layout)
        }
    }

    /// Boundary projector: `r_k x d`, zero on moment columns. Needs `k < eta`.
    pub fn boundary_projector(&self, layout: &LocalDofLayout) -> Result<DMatrix<f64>> {
        Ok(&self.to_monomial * self.boundary_projector_q(layout)?)
    }

    /// Euclidean projector `(D^T D)^{-1} D^T` on the serendipity DoFs.
    pub fn serendipity_projector(&self, layout: &LocalDofLayout) -> Result<DMatrix<f64>> {
        Ok(&self.to_monomial * self.serendipity_projector_q(layout)?)
    }

    /// The projector that defines the missing moments of the serendipity space.
    pub fn reconstruction_projector(&self, layout: &LocalDofLayout) -> Result<DMatrix<f64>> {
        Ok(&self.to_monomial * self.reconstruction_projector_q(layout)?)
    }

    /// `(kN + r_k) x d` map to the enlarged DoFs. Missing moments `a` are
    /// `(1/|E|) H[a, :] proj` for a projector given in monomial coefficients.
    pub fn lift(&self, layout: &LocalDofLayout, proj: &DMatrix<f64>) -> DMatrix<f64> {
        let r = self.basis.len();
        let keep = layout.n_moments;
        self.lift_with(layout, &(self.mass.rows(keep, r - keep) * proj / self.area))
    }

    /// Lift with the projector given in orthonormal coefficients.
    fn lift_q(&self, layout: &LocalDofLayout, proj_q: &DMatrix<f64>) -> DMatrix<f64> {
        let r = self.basis.len();
        let keep = layout.n_moments;
        self.lift_with(layout, &(self.basis_moments().rows(keep, r - keep) * proj_q))
    }

    fn lift_with(&self, layout: &LocalDofLayout, missing: &DMatrix<f64>) -> DMatrix<f64> {
        let nb = layout.n_boundary();
        let r = self.basis.len();
        let mut l = DMatrix::zeros(nb + r, layout.len());
        for i in 0..nb {
            l[(i, i)] = 1.0;
        }
        for a in 0..layout.n_moments {
            l[(nb + a, layout.moment(a))] = 1.0;
        }
        l.rows_mut(nb + layout.n_moments, r - layout.n_moments).copy_from(missing);
        l
    }

    /// Ritz system `(G, B)` in monomials acting on enlarged DoFs: rows
    /// `a >= 1` hold the gradient Gram and Green's formula, row 0 the closure.
    pub fn ritz_system(&self, layout: &LocalDofLayout) -> (DMatrix<f64>, DMatrix<f64>) {
        let k = self.k;
        let r = self.basis.len();
        let nb = layout.n_boundary();
        let mut g = self.grad_gram.clone();
        let mut b = DMatrix::zeros(r, nb + r);
        let mut m = vec![0.0; r];
        for (j, e) in self.edges.iter().enumerate() {
            let trace = layout.edge_trace(j);
            for (q, (&p, &w)) in e.points.iter().zip(&e.weights).enumerate() {
                let grads = self.basis.grad(p);
                for a in 1..r {
                    let dn = grads[a].dot(&e.normal) * w;
                    for (l, &i) in trace.iter().enumerate() {
                        b[(a, i)] += dn * self.edge_rule.interp[q][l];
                    }
                }
                if k == 1 {
                    self.basis.eval_into(p, &mut m);
                    for c in 0..r {
                        g[(0, c)] += w * m[c];
                    }
                    for (l, &i) in trace.iter().enumerate() {
                        b[(0, i)] += w * self.edge_rule.interp[q][l];
                    }
                }
            }
        }
        for a in 1..r {
            for (gamma, c) in self.basis.laplacian(a) {
                b[(a, nb + gamma)] -= self.area * c;
            }
        }
        if k > 1 {
            for c in 0..r {
                g[(0, c)] = self.mass[(0, c)];
            }
            b[(0, nb)] = self.area;
        }
        (g, b)
    }

    /// The same system for the orthonormal basis.
    fn ritz_system_q(&self, layout: &LocalDofLayout) -> (DMatrix<f64>, DMatrix<f64>) {
        let (g, mut b) = self.ritz_system(layout);
        let t = &self.to_monomial;
        let closure_g = g.row(0) * t;
        let closure_b = b.row(0).into_owned();
        // the Green row of m_0 vanishes, so T^T only mixes Green rows
        b.row_mut(0).fill(0.0);
        let mut gq = self.grad_gram_q.clone();
        let mut bq = t.transpose() * b;
        gq.row_mut(0).copy_from(&closure_g);
        bq.row_mut(0).copy_from(&closure_b);
        (gq, bq)
    }

    /// Conditioning is judged on the orthonormal system, but the solve runs
    /// on the monomial one: forming `T^T B` cancels badly once `|T|` is large,
    /// while the monomial system keeps `G D = B L D` to rounding.
    fn ritz_projector_q(&self, layout: &LocalDofLayout, lift: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        let (gq, _) = self.ritz_system_q(layout);
        let condition = condition_number(&gq);
        if !(condition <= CONDITION_LIMIT) {
            return Err(Error::Conditioning {
                cell: self.cell,
                what: "Ritz",
                condition,
            });
        }
        let (g, b) = self.ritz_system(layout);
        let pm = g.col_piv_qr().solve(&(b * lift)).ok_or(Error::Conditioning {
            cell: self.cell,
            what: "Ritz",
            condition,
        })?;
        // T = sqrt|E| R^{-1}
        Ok(&self.chol * pm / self.area.sqrt())
    }

    fn l2_projector_q(&self, layout: &LocalDofLayout, lift: &DMatrix<f64>) -> DMatrix<f64> {
        // H T a = |E| mu  <=>  R^T a = sqrt|E| mu
        let r = self.basis.len();
        let rhs = lift.rows(layout.n_boundary(), r) * self.area.sqrt();
        self.chol
            .transpose()
            .solve_lower_triangular(&rhs)
            .expect("triangular factor has a positive diagonal")
    }

    /// `Pi_nabla = G^{-1} B L` in monomial coefficients.
    pub fn ritz_projector(&self, layout: &LocalDofLayout, lift: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        Ok(&self.to_monomial * self.ritz_projector_q(layout, lift)?)
    }

    /// `Pi_0 = H^{-1} |E| (moment rows of L)` in monomial coefficients.
    pub fn l2_projector(&self, layout: &LocalDofLayout, lift: &DMatrix<f64>) -> DMatrix<f64> {
        &self.to_monomial * self.l2_projector_q(layout, lift)
    }

    /// All operators of one cell for the given moment layout.
    pub fn operators(self, eta: usize, kind: SpaceKind) -> Result<ElementOperators> {
        let layout = self.layout(eta, kind);
        let r = self.basis.len();
        let keep = layout.n_moments;
        let (projector, lift, pn) = match kind {
            SpaceKind::Serendipity => {
                let p = self.reconstruction_projector_q(&layout)?;
                let lift = self.lift_q(&layout, &p);
                let pn = self.ritz_projector_q(&layout, &lift)?;
                (Some(&self.to_monomial * p), lift, pn)
            }
            SpaceKind::Enhanced => {
                // Green's formula only reads moments up to degree k - 2
                let mut lift = self.lift_with(&layout, &DMatrix::zeros(r - keep, layout.len()));
                let pn = self.ritz_projector_q(&layout, &lift)?;
                let rest = self.basis_moments().rows(keep, r - keep) * &pn;
                lift.rows_mut(layout.n_boundary() + keep, r - keep).copy_from(&rest);
                (None, lift, pn)
            }
        };
        let p0 = self.l2_projector_q(&layout, &lift);
        let dq = self.basis_dofs(&layout);
        let n = layout.len();
        let eye = DMatrix::<f64>::identity(n, n);
        let sn = &eye - &dq * &pn;
        let mut stiffness = pn.transpose() * &self.grad_gram_q * &pn + sn.transpose() * &sn;
        let s0 = &eye - &dq * &p0;
        let mut mass = (p0.transpose() * &p0 + s0.transpose() * &s0) * self.area;
        symmetrize(&mut stiffness);
        symmetrize(&mut mass);
        if mass.clone().cholesky().is_none() {
            return Err(Error::Internal(format!("local mass of cell {} is not positive definite", self.cell)));
        }
        let phi = &self.values_q * &p0;
        Ok(ElementOperators {
            layout,
            d: self.monomial_dofs(&layout),
            projector,
            lift,
            pi_nabla: &self.to_monomial * pn,
            pi_zero: &self.to_monomial * p0,
            stiffness,
            mass,
            phi,
            element: self,
        })
    }
}

fn symmetrize(m: &mut DMatrix<f64>) {
    let t = m.transpose();
    *m += t;
    *m *= 0.5;
}

/// Per-cell matrices. Rows of the projectors are scaled-monomial
/// coefficients and columns local DoFs.
#[derive(Debug, Clone)]
pub struct ElementOperators {
    pub layout: LocalDofLayout,
    pub d: DMatrix<f64>,
    /// Boundary or Euclidean serendipity projector; `None` for the enhanced layout.
    pub projector: Option<DMatrix<f64>>,
    pub lift: DMatrix<f64>,
    pub pi_nabla: DMatrix<f64>,
    pub pi_zero: DMatrix<f64>,
    /// Stiffness for unit diffusion.
    pub stiffness: DMatrix<f64>,
    pub mass: DMatrix<f64>,
    /// `phi[(q, i)] = (Pi_0 phi_i)(x_q)` at the cell quadrature points.
    pub phi: DMatrix<f64>,
    pub element: Element,
}

impl ElementOperators {
    pub fn len(&self) -> usize {
        self.layout.len()
    }

    pub fn is_empty(&self) -> bool {
        self.layout.is_empty()
    }

    /// `(A_E, M_E)` for diffusion coefficient `eps`.
    pub fn local_matrices(&self, eps: f64) -> (DMatrix<f64>, DMatrix<f64>) {
        (&self.stiffness * eps, self.mass.clone())
    }

    pub fn dof_vector(&self, g: impl Fn(Point) -> f64) -> DVector<f64> {
        self.element.dof_vector(&self.layout, g)
    }
}

/// Largest `L2(E)`-relative error over the columns of `proj * d - I`, where
/// `d` holds the DoF vectors of the monomials and `mass` their Gram matrix.
pub fn reproduction_error(mass: &DMatrix<f64>, proj: &DMatrix<f64>, d: &DMatrix<f64>) -> f64 {
    let r = d.ncols();
    let e = proj * d - DMatrix::identity(r, r);
    (0..r)
        .map(|b| {
            let col = e.column(b);
            ((col.transpose() * mass * col)[0].max(0.0) / mass[(b, b)]).sqrt()
        })
        .fold(0.0, f64::max)
}

/// Builds the operators of one mesh cell with the default quadrature.
pub fn element_operators(points: &[Point], geom: &CellGeometry, k: usize, eta: usize, kind: SpaceKind) -> Result<ElementOperators> {
    let edge = EdgeRule::new(k)?;
    let quad = TriangleRule::new(default_quadrature_degree(k));
    Element::new(0, points, geom, k, &edge, &quad)?.operators(eta, kind)
}

/// Exactness of the cell rule: `2k + 2`.
pub fn default_quadrature_degree(k: usize) -> usize {
    2 * k + 2
}

use approx::assert_relative_eq;
use nalgebra::{DMatrix, DVector};

use super::*;
use super::element::reproduction_error;
use crate::error::Error;
use crate::mesh::{compute_eta, compute_geometry, EtaStrategy, Point};
use crate::polyspace::{EdgeRule, TriangleRule};

fn pts(raw: &[(f64, f64)]) -> Vec<Point> {
    raw.iter().map(|&(x, y)| Point::new(x, y)).collect()
}

fn unit_square() -> Vec<Point> {
    pts(&[(0., 0.), (1., 0.), (1., 1.), (0., 1.)])
}

fn pentagon() -> Vec<Point> {
    pts(&[(0.1, 0.0), (1.0, 0.2), (1.2, 0.9), (0.5, 1.3), (-0.2, 0.7)])
}

fn element(points: &[Point], k: usize) -> Element {
    let g = compute_geometry(points).unwrap();
    Element::new(0, points, &g, k, &EdgeRule::new(k).unwrap(), &TriangleRule::new(default_quadrature_degree(k))).unwrap()
}

fn ops(points: &[Point], k: usize, kind: SpaceKind) -> ElementOperators {
    let eta = compute_eta(points, &EtaStrategy::stingy(1e-6));
    element(points, k).operators(eta, kind).unwrap()
}

fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |a, &b| a.max(b.abs()))
}

/// Projector `p` applied to `D` must give the identity on `P_k`; the error
/// of each column is measured in the `L2(E)` norm relative to `m_b`.
fn assert_reproduces(o: &ElementOperators, p: &DMatrix<f64>, tol: f64) {
    let err = reproduction_error(&o.element.mass, p, &o.d);
    assert!(err <= tol, "reproduction error {err:e}");
}

#[test]
fn dof_vector_of_constant_and_monomial() {
    let sq = unit_square();
    let e = element(&sq, 4);
    let lay = e.layout(4, SpaceKind::Serendipity);
    let one = e.dof_vector(&lay, |_| 1.0);
    assert!(one.rows(0, 16).iter().all(|&v| v == 1.0));
    assert_relative_eq!(one[16], 1.0, epsilon = 1e-14);
    let d = e.monomial_dofs(&lay);
    let b = 7;
    let col = e.dof_vector(&lay, |p| e.basis.eval(p)[b]);
    assert_relative_eq!(col, d.column(b).into_owned(), epsilon = 1e-14);
}

#[test]
fn boundary_projector_reproduces_polynomials() {
    let pent = pentagon();
    for k in 1..=4 {
        let e = element(&pent, k);
        let lay = e.layout(5, SpaceKind::Serendipity);
        let p = e.boundary_projector(&lay).unwrap();
        assert!(reproduction_error(&e.mass, &p, &e.monomial_dofs(&lay)) <= 1e-11);
    }
}

#[test]
fn boundary_projector_needs_ideal_case() {
    let e = element(&unit_square(), 4);
    let err = e.boundary_projector(&e.layout(4, SpaceKind::Serendipity)).unwrap_err();
    assert!(matches!(err, Error::ConditionViolation { k: 4, eta: 4, .. }));
    // a wrongly large eta still fails: the Gram matrix is singular
    let err = e.boundary_projector(&e.layout(5, SpaceKind::Serendipity)).unwrap_err();
    assert!(matches!(err, Error::ConditionViolation { .. }), "{err}");
}

#[test]
fn boundary_projector_of_trace_of_x() {
    let e = element(&unit_square(), 1);
    let lay = e.layout(4, SpaceKind::Serendipity);
    let p = e.boundary_projector(&lay).unwrap();
    let c = p * DVector::from_vec(vec![0.0, 1.0, 1.0, 0.0]);
    // x = 1/2 + sqrt(2) m_(1,0) with h_E = sqrt(2), x_E = (1/2, 1/2)
    assert_relative_eq!(c, DVector::from_vec(vec![0.5, 2f64.sqrt(), 0.0]), epsilon = 1e-14);
}

#[test]
fn serendipity_projector_on_deficient_square() {
    let sq = unit_square();
    let e = element(&sq, 4);
    let lay = e.layout(4, SpaceKind::Serendipity);
    assert_eq!(lay.len(), 17);
    let p = e.serendipity_projector(&lay).unwrap();
    assert_eq!(p.shape(), (15, 17));
    assert!(reproduction_error(&e.mass, &p, &e.monomial_dofs(&lay)) <= 1e-11);
    // also a projector in the ideal case, though a different operator
    let pent = pentagon();
    let e = element(&pent, 3);
    let lay = e.layout(5, SpaceKind::Serendipity);
    let ps = e.serendipity_projector(&lay).unwrap();
    let pb = e.boundary_projector(&lay).unwrap();
    let d = e.monomial_dofs(&lay);
    assert!(reproduction_error(&e.mass, &ps, &d) <= 1e-11);
    assert!(reproduction_error(&e.mass, &pb, &d) <= 1e-11);
    assert!(max_abs(&(ps - pb)) > 1e-6);
}

#[test]
fn nonconvex_deficient_cell_is_unsupported() {
    let l = pts(&[(0., 0.), (2., 0.), (2., 1.), (1., 1.), (1., 2.), (0., 2.)]);
    let e = element(&l, 6);
    let err = e.serendipity_projector(&e.layout(6, SpaceKind::Serendipity)).unwrap_err();
    assert!(matches!(err, Error::Unsupported { .. }));
    assert_eq!(err.code(), 22);
}

#[test]
fn lift_dimensions_and_moments() {
    let o = ops(&unit_square(), 2, SpaceKind::Serendipity);
    assert_eq!(o.lift.shape(), (14, 8));
    let one = o.dof_vector(|_| 1.0);
    let lifted = &o.lift * &one;
    assert_relative_eq!(lifted[8], 1.0, epsilon = 1e-14);
    // lifted moments of a polynomial are its exact moments
    let p = |q: Point| 1.0 + q.x - 2.0 * q.x * q.y + q.y * q.y;
    let lifted = &o.lift * o.dof_vector(p);
    let exact = o.element.moments(p, 6);
    for a in 0..6 {
        assert_relative_eq!(lifted[8 + a], exact[a], epsilon = 1e-13);
    }
}

#[test]
fn every_projector_reproduces_polynomials() {
    let hex = pts(&[(0., 0.), (1., -0.1), (1.6, 0.5), (1.3, 1.2), (0.4, 1.3), (-0.3, 0.6)]);
    for points in [unit_square(), pentagon(), hex] {
        for k in 1..=6 {
            for kind in [SpaceKind::Serendipity, SpaceKind::Enhanced] {
                let o = ops(&points, k, kind);
                assert_reproduces(&o, &o.pi_nabla, 1e-10);
                assert_reproduces(&o, &o.pi_zero, 1e-10);
                if let Some(p) = &o.projector {
                    assert_reproduces(&o, p, 1e-10);
                }
                // plain coefficients carry the conditioning of the monomials
                let r = o.d.ncols();
                assert!(max_abs(&(&o.pi_nabla * &o.d - DMatrix::identity(r, r))) <= 1e-6);
            }
        }
    }
}

#[test]
fn ritz_of_constant_is_constant() {
    for k in 1..=3 {
        let o = ops(&pentagon(), k, SpaceKind::Serendipity);
        let c = &o.pi_nabla * o.dof_vector(|_| 1.0);
        assert_relative_eq!(c[0], 1.0, epsilon = 1e-13);
        assert!(c.rows(1, c.len() - 1).amax() < 1e-13);
    }
}

/// For `k = 1` the Ritz projection of a vertex basis function depends on its
/// trace only; the bilinear hat `x (1 - y)` has the trace of DoF vector `e_1`.
/// Its gradient pairings come from a fine midpoint grid.
#[test]
fn ritz_of_vertex_function_matches_grid_oracle() {
    let o = ops(&unit_square(), 1, SpaceKind::Serendipity);
    let c = o.pi_nabla.column(1).into_owned();
    let n = 400;
    let (mut gx, mut gy) = (0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            let (x, y) = ((i as f64 + 0.5) / n as f64, (j as f64 + 0.5) / n as f64);
            gx += (1.0 - y) / (n * n) as f64;
            gy += -x / (n * n) as f64;
        }
    }
    // P_1 is spanned by 1, x, y; grad-Gram is the identity, closure gives the constant
    let (a, b) = (gx, gy);
    let c0 = (1.0 - a * 2.0 - b * 2.0) / 4.0;
    let h = 2f64.sqrt();
    let oracle = DVector::from_vec(vec![c0 + a * 0.5 + b * 0.5, a * h, b * h]);
    assert_relative_eq!(c, oracle, epsilon = 1e-12);
    assert_relative_eq!(c0 + 0.5 * a + 0.5 * b, 0.25 + 0.25 - 0.25, epsilon = 1e-12);
}

#[test]
fn l2_projector_properties() {
    let e = element(&pentagon(), 3);
    let lay = e.layout(5, SpaceKind::Serendipity);
    // enlarged DoFs with zero moments give a zero L2 projection
    let mut lift = DMatrix::zeros(lay.n_boundary() + 10, 1);
    lift[(0, 0)] = 3.0;
    lift[(4, 0)] = -1.0;
    let c = e.l2_projector(&lay, &lift);
    assert_eq!(c.amax(), 0.0);

    let o = ops(&pentagon(), 3, SpaceKind::Serendipity);
    let v = DVector::from_fn(o.len(), |i, _| ((i * 7 + 3) % 11) as f64 / 5.0 - 1.0);
    let coef = &o.pi_zero * &v;
    let lifted = &o.lift * &v;
    let el = &o.element;
    let moments = el.moments(|p| el.basis.eval_poly(coef.as_slice(), p), 10);
    for a in 0..10 {
        assert_relative_eq!(moments[a], lifted[lay.n_boundary() + a], epsilon = 1e-12);
    }
}

#[test]
fn stiffness_kernel_and_consistency() {
    for (points, k) in [(unit_square(), 2), (unit_square(), 4), (pentagon(), 3), (pentagon(), 6)] {
        let o = ops(&points, k, SpaceKind::Serendipity);
        let (a, m) = o.local_matrices(1.0);
        let one = o.dof_vector(|_| 1.0);
        assert!((&a * &one).amax() <= 1e-12 * a.amax());
        // a_h(v, p) = \int grad v . grad p = (B L v)_p for p >= 1
        let (_, b) = o.element.ritz_system(&o.layout);
        let exact_a = (b * &o.lift).transpose();
        let ad = &a * &o.d;
        let r = o.d.ncols();
        let scale = max_abs(&ad).max(1.0);
        assert!(max_abs(&(ad.columns(1, r - 1) - exact_a.columns(1, r - 1))) <= 1e-10 * scale);
        // m_h(v, p) = \int v p = |E| mu_p(v)
        let exact_m = o.lift.rows(o.layout.n_boundary(), r).transpose() * o.element.area;
        let md = &m * &o.d;
        assert!(max_abs(&(md - exact_m)) <= 1e-12);
        // kernel of A is one-dimensional
        let eig = a.clone().symmetric_eigen().eigenvalues;
        let zero = eig.iter().filter(|&&l| l.abs() < 1e-10 * eig.amax()).count();
        assert_eq!(zero, 1, "{eig}");
        assert!(m.clone().cholesky().is_some());
    }
}

/// Independent evaluation of `M_E` for the unit square at `k = 1` using the
/// unscaled basis `1, x, y` and Simpson's rule on the edges.
#[test]
fn unit_square_mass_oracle() {
    let o = ops(&unit_square(), 1, SpaceKind::Serendipity);
    let v = [(0., 0.), (1., 0.), (1., 1.), (0., 1.)];
    let basis = |x: f64, y: f64| [1.0, x, y];
    let mut g = DMatrix::<f64>::zeros(3, 3);
    let mut b = DMatrix::<f64>::zeros(3, 4);
    for j in 0..4 {
        let (a, c) = (v[j], v[(j + 1) % 4]);
        for (s, w) in [(0.0, 1.0 / 6.0), (0.5, 4.0 / 6.0), (1.0, 1.0 / 6.0)] {
            let (x, y) = (a.0 + s * (c.0 - a.0), a.1 + s * (c.1 - a.1));
            let m = basis(x, y);
            for p in 0..3 {
                for q in 0..3 {
                    g[(p, q)] += w * m[p] * m[q];
                }
                b[(p, j)] += w * m[p] * (1.0 - s);
                b[(p, (j + 1) % 4)] += w * m[p] * s;
            }
        }
    }
    let pi = g.lu().solve(&b).unwrap();
    // moments of degree <= 1 come from the projector, so Pi_0 = Pi_boundary
    let h = DMatrix::from_row_slice(3, 3, &[1.0, 0.5, 0.5, 0.5, 1.0 / 3.0, 0.25, 0.5, 0.25, 1.0 / 3.0]);
    let d = DMatrix::from_fn(4, 3, |i, p| basis(v[i].0, v[i].1)[p]);
    let s = DMatrix::identity(4, 4) - &d * &pi;
    let oracle = pi.transpose() * h * &pi + s.transpose() * s;
    assert_relative_eq!(o.mass, oracle, epsilon = 1e-14);
}

#[test]
fn enhanced_layout_keeps_low_moments() {
    let o = ops(&pentagon(), 3, SpaceKind::Enhanced);
    assert_eq!(o.layout.n_moments, 3);
    assert_eq!(o.len(), 15 + 3);
    assert!(o.projector.is_none());
    // constant functions are in the kernel of the stiffness
    let one = o.dof_vector(|_| 1.0);
    assert!((&o.stiffness * one).amax() < 1e-12);
}

//! Quadrature on polygons by sub-triangulation.
//!
//! Each triangle carries a collapsed (Duffy) tensor Gauss–Legendre rule, so
//! any exactness degree is available without tabulated rules.

use nalgebra::DMatrix;

use super::gauss::gauss_legendre;
use super::monomials::ScaledMonomialBasis;
use crate::error::{Error, Result};
use crate::mesh::{signed_area, Point};

/// Reference rule on the triangle `{(u, v) : u, v in [0, 1]}` under the
/// collapsed map `a + u (b - a) + u v (c - b)`; weights sum to 1/2.
#[derive(Debug, Clone)]
pub struct TriangleRule {
    /// `(s, t)` barycentric-like coordinates: point = a + s (b - a) + t (c - a).
    pub points: Vec<(f64, f64)>,
    pub weights: Vec<f64>,
    pub degree: usize,
}

impl TriangleRule {
    pub fn new(degree: usize) -> Self {
        let nu = (degree + 2).div_ceil(2);
        let nv = (degree + 1).div_ceil(2).max(1);
        let (xu, wu) = gauss_legendre(nu);
        let (xv, wv) = gauss_legendre(nv);
        let mut points = Vec::with_capacity(nu * nv);
        let mut weights = Vec::with_capacity(nu * nv);
        for (xu, wu) in xu.iter().zip(&wu) {
            let u = 0.5 * (xu + 1.0);
            for (xv, wv) in xv.iter().zip(&wv) {
                let v = 0.5 * (xv + 1.0);
                // a + u(b - a) + uv(c - b) = a + u(1 - v)(b - a) + uv(c - a)
                points.push((u * (1.0 - v), u * v));
                weights.push(0.25 * wu * wv * u);
            }
        }
        TriangleRule {
            points,
            weights,
            degree,
        }
    }

    pub fn map_into(&self, a: Point, b: Point, c: Point, points: &mut Vec<Point>, weights: &mut Vec<f64>) {
        let jac = 2.0 * signed_area(&[a, b, c]);
        for (&(s, t), &w) in self.points.iter().zip(&self.weights) {
            points.push(a + (b - a) * s + (c - a) * t);
            weights.push(w * jac);
        }
    }
}

/// Quadrature nodes and weights on one cell.
#[derive(Debug, Clone)]
pub struct PolygonRule {
    pub points: Vec<Point>,
    pub weights: Vec<f64>,
    pub degree: usize,
}

impl PolygonRule {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(Point) -> f64) -> f64 {
        self.points.iter().zip(&self.weights).map(|(&p, w)| w * f(p)).sum()
    }
}

/// Ear-clipping triangulation of a simple CCW polygon.
pub fn ear_clip(points: &[Point]) -> Option<Vec<[usize; 3]>> {
    let n = points.len();
    let mut idx: Vec<usize> = (0..n).collect();
    let mut tris = Vec::with_capacity(n.saturating_sub(2));
    let scale = points
        .iter()
        .map(|p| (p - points[0]).norm())
        .fold(0.0, f64::max);
    let tol = 1e-14 * scale * scale;
    while idx.len() > 3 {
        let m = idx.len();
        let mut clipped = false;
        for i in 0..m {
            let (ia, ib, ic) = (idx[(i + m - 1) % m], idx[i], idx[(i + 1) % m]);
            let (a, b, c) = (points[ia], points[ib], points[ic]);
            if signed_area(&[a, b, c]) <= tol {
                continue;
            }
            let blocked = idx.iter().any(|&j| {
                if j == ia || j == ib || j == ic {
                    return false;
                }
                let p = points[j];
                signed_area(&[a, b, p]) >= -tol
                    && signed_area(&[b, c, p]) >= -tol
                    && signed_area(&[c, a, p]) >= -tol
            });
            if !blocked {
                tris.push([ia, ib, ic]);
                idx.remove(i);
                clipped = true;
                break;
            }
        }
        if !clipped {
            return None;
        }
    }
    if signed_area(&[points[idx[0]], points[idx[1]], points[idx[2]]]) <= tol {
        return None;
    }
    tris.push([idx[0], idx[1], idx[2]]);
    Some(tris)
}

/// Rule of exactness `degree` on the polygon `points` (CCW).
///
/// Fans from `centroid` when every fan triangle is positively oriented and
/// falls back to ear clipping otherwise.
pub fn polygon_quadrature(points: &[Point], centroid: Point, degree: usize) -> Result<PolygonRule> {
    let tri = TriangleRule::new(degree);
    polygon_quadrature_with(points, centroid, &tri)
}

pub fn polygon_quadrature_with(points: &[Point], centroid: Point, tri: &TriangleRule) -> Result<PolygonRule> {
    let n = points.len();
    let scale = points.iter().map(|p| (p - centroid).norm()).fold(0.0, f64::max);
    let fan_ok = (0..n).all(|i| signed_area(&[centroid, points[i], points[(i + 1) % n]]) > 1e-14 * scale * scale);
    let mut pts = Vec::new();
    let mut wts = Vec::new();
    if fan_ok {
        for i in 0..n {
            tri.map_into(centroid, points[i], points[(i + 1) % n], &mut pts, &mut wts);
        }
    } else {
        let tris = ear_clip(points).ok_or(Error::Triangulation { cell: 0 })?;
        for [a, b, c] in tris {
            tri.map_into(points[a], points[b], points[c], &mut pts, &mut wts);
        }
    }
    Ok(PolygonRule {
        points: pts,
        weights: wts,
        degree: tri.degree,
    })
}

/// `H_ab = \int_E m_a m_b`, checked for positive definiteness.
pub fn monomial_mass(basis: &ScaledMonomialBasis, rule: &PolygonRule) -> Result<DMatrix<f64>> {
    let r = basis.len();
    let mut h = DMatrix::zeros(r, r);
    let mut v = vec![0.0; r];
    for (&p, &w) in rule.points.iter().zip(&rule.weights) {
        basis.eval_into(p, &mut v);
        for j in 0..r {
            let wj = w * v[j];
            for i in j..r {
                h[(i, j)] += wj * v[i];
            }
        }
    }
    for j in 0..r {
        for i in j + 1..r {
            h[(j, i)] = h[(i, j)];
        }
    }
    if h.clone().cholesky().is_none() {
        return Err(Error::NotPositiveDefinite {
            what: "monomial mass",
            pivot: 0,
        });
    }
    Ok(h)
}

//! One-dimensional Gauss–Legendre and Gauss–Lobatto rules on `[-1, 1]`.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
pub fn legendre(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let (mut p0, mut p1) = (1.0, x);
    for j in 2..=n {
        let p2 = ((2 * j - 1) as f64 * x * p1 - (j - 1) as f64 * p0) / j as f64;
        p0 = p1;
        p1 = p2;
    }
    // derivative from P_n and P_{n-1}; at |x| = 1 use the closed form
    let dp = if (1.0 - x * x).abs() < 1e-300 {
        let s = if x > 0.0 || n % 2 == 1 { 1.0 } else { -1.0 };
        s * (n * (n + 1)) as f64 / 2.0
    } else {
        n as f64 * (p0 - x * p1) / (1.0 - x * x)
    };
    (p1, dp)
}

/// `n`-point Gauss–Legendre nodes (ascending) and weights; exact to degree `2n - 1`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    if n == 0 {
        return (vec![], vec![]);
    }
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        let mut x = -(PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() <= 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre(n, x);
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    symmetrize(&mut nodes, &mut weights);
    (nodes, weights)
}

/// `p`-point Gauss–Lobatto nodes (ascending, endpoints exactly `±1`) and
/// weights; exact to degree `2p - 3`.
///
/// Interior nodes are the roots of `P'_{p-1}`, found by Newton iteration
/// started from the Chebyshev–Gauss–Lobatto points.
pub fn gauss_lobatto(p: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if p < 2 {
        return Err(Error::InvalidArgument(format!(
            "Gauss-Lobatto rule needs at least 2 points, got {p}"
        )));
    }
    let n = p - 1;
    let mut nodes = vec![0.0; p];
    nodes[0] = -1.0;
    nodes[n] = 1.0;
    for j in 1..n {
        let mut x = -(PI * j as f64 / n as f64).cos();
        for _ in 0..100 {
            let (pn, dpn) = legendre(n, x);
            // (1 - x^2) P'' = 2x P' - n(n+1) P
            let d2 = (2.0 * x * dpn - (n * (n + 1)) as f64 * pn) / (1.0 - x * x);
            let dx = dpn / d2;
            x -= dx;
            if dx.abs() <= 1e-15 {
                break;
            }
        }
        nodes[j] = x;
    }
    let scale = 2.0 / (p * n) as f64;
    let mut weights: Vec<f64> = nodes
        .iter()
        .map(|&x| {
            let (pn, _) = legendre(n, x);
            scale / (pn * pn)
        })
        .collect();
    symmetrize(&mut nodes, &mut weights);
    Ok((nodes, weights))
}

fn symmetrize(nodes: &mut [f64], weights: &mut [f64]) {
    let n = nodes.len();
    for i in 0..n / 2 {
        let j = n - 1 - i;
        let x = 0.5 * (nodes[j] - nodes[i]);
        let w = 0.5 * (weights[i] + weights[j]);
        nodes[i] = -x;
        nodes[j] = x;
        weights[i] = w;
        weights[j] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
}

/// Lagrange basis on `nodes` evaluated at `x`.
pub fn lagrange_basis(nodes: &[f64], x: f64) -> Vec<f64> {
    (0..nodes.len())
        .map(|j| {
            nodes
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != j)
                .map(|(_, &xi)| (x - xi) / (nodes[j] - xi))
                .product()
        })
        .collect()
}

/// Edge rules for degree `k`: the `k + 1` Gauss–Lobatto nodes carrying the
/// edge DoFs and the `k + 1` Gauss–Legendre points used to integrate traces.
#[derive(Debug, Clone)]
pub struct EdgeRule {
    pub lobatto_nodes: Vec<f64>,
    pub lobatto_weights: Vec<f64>,
    pub legendre_nodes: Vec<f64>,
    pub legendre_weights: Vec<f64>,
    /// `interp[q][l]`: Lagrange basis of Lobatto node `l` at Legendre point `q`.
    pub interp: Vec<Vec<f64>>,
}

impl EdgeRule {
    pub fn new(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidArgument("degree k must be >= 1".into()));
        }
        let (lobatto_nodes, lobatto_weights) = gauss_lobatto(k + 1)?;
        let (legendre_nodes, legendre_weights) = gauss_legendre(k + 1);
        let interp = legendre_nodes
            .iter()
            .map(|&t| lagrange_basis(&lobatto_nodes, t))
            .collect();
        Ok(EdgeRule {
            lobatto_nodes,
            lobatto_weights,
            legendre_nodes,
            legendre_weights,
            interp,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// Bisection oracle for the roots of `P'_n` on `[-1, 1]`.
    fn bisection_roots_of_dp(n: usize) -> Vec<f64> {
        let f = |x: f64| legendre(n, x).1;
        let m = 19999; // odd, so no grid point sits on the root at 0
        let mut roots = Vec::new();
        for i in 0..m {
            let (mut a, mut b) = (-1.0 + 2.0 * i as f64 / m as f64, -1.0 + 2.0 * (i + 1) as f64 / m as f64);
            if i == 0 {
                a += 1e-12;
            }
            if i == m - 1 {
                b -= 1e-12;
            }
            if f(a) * f(b) < 0.0 {
                for _ in 0..200 {
                    let c = 0.5 * (a + b);
                    if f(a) * f(c) <= 0.0 {
                        b = c;
                    } else {
                        a = c;
                    }
                }
                roots.push(0.5 * (a + b));
            }
        }
        roots
    }

    #[test]
    fn two_and_three_points() {
        assert_eq!(gauss_lobatto(2).unwrap(), (vec![-1.0, 1.0], vec![1.0, 1.0]));
        let (x, w) = gauss_lobatto(3).unwrap();
        assert_eq!(x, vec![-1.0, 0.0, 1.0]);
        assert_relative_eq!(w.as_slice(), [1.0 / 3.0, 4.0 / 3.0, 1.0 / 3.0].as_slice(), epsilon = 1e-15);
    }

    #[test]
    fn four_points_interior_roots() {
        let (x, w) = gauss_lobatto(4).unwrap();
        let r = 1.0 / 5f64.sqrt();
        assert_relative_eq!(x.as_slice(), [-1.0, -r, r, 1.0].as_slice(), epsilon = 1e-15);
        assert_relative_eq!(w.as_slice(), [1.0 / 6.0, 5.0 / 6.0, 5.0 / 6.0, 1.0 / 6.0].as_slice(), epsilon = 1e-14);
    }

    #[test]
    fn lobatto_interior_nodes_match_bisection() {
        for p in 3..=10 {
            let (x, _) = gauss_lobatto(p).unwrap();
            let roots = bisection_roots_of_dp(p - 1);
            assert_eq!(roots.len(), p - 2);
            for (a, b) in x[1..p - 1].iter().zip(&roots) {
                assert!((a - b).abs() <= 1e-14, "p = {p}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn exactness() {
        let exact = |d: usize| if d % 2 == 1 { 0.0 } else { 2.0 / (d + 1) as f64 };
        for p in 2..=9 {
            let (x, w) = gauss_lobatto(p).unwrap();
            assert_relative_eq!(w.iter().sum::<f64>(), 2.0, epsilon = 1e-14);
            for d in 0..=(2 * p - 3) {
                let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(d as i32)).sum();
                assert!((q - exact(d)).abs() <= 1e-14, "lobatto p={p} d={d}");
            }
            let (x, w) = gauss_legendre(p);
            for d in 0..=(2 * p - 1) {
                let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(d as i32)).sum();
                assert!((q - exact(d)).abs() <= 1e-14, "legendre p={p} d={d}");
            }
        }
    }

    #[test]
    fn rejects_single_point() {
        assert!(gauss_lobatto(1).is_err());
    }

    #[test]
    fn lagrange_is_cardinal() {
        let (x, _) = gauss_lobatto(5).unwrap();
        for (j, &xj) in x.iter().enumerate() {
            let l = lagrange_basis(&x, xj);
            for (i, v) in l.iter().enumerate() {
                assert_relative_eq!(*v, if i == j { 1.0 } else { 0.0 }, epsilon = 1e-14);
            }
        }
    }
}

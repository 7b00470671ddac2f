use crate::mesh::Point;

/// Dimension of the bivariate polynomials of total degree `<= k`.
pub const fn poly_dim(k: usize) -> usize {
    (k + 1) * (k + 2) / 2
}

/// Dimension of `P_k` for a possibly negative degree (`0` when `k < 0`).
pub fn poly_dim_signed(k: isize) -> usize {
    if k < 0 {
        0
    } else {
        poly_dim(k as usize)
    }
}

/// Position of the exponent `(a, b)` in the graded ordering.
pub fn monomial_index(a: usize, b: usize) -> usize {
    let d = a + b;
    if d == 0 {
        0
    } else {
        poly_dim(d - 1) + b
    }
}

/// Monomials `((x - x_E) / h_E)^a ((y - y_E) / h_E)^b` with `a + b <= k`,
/// ordered by degree and, within a degree, by increasing power of `y`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledMonomialBasis {
    center: Point,
    scale: f64,
    degree: usize,
    exponents: Vec<(usize, usize)>,
}

impl ScaledMonomialBasis {
    pub fn new(center: Point, scale: f64, degree: usize) -> Self {
        let mut exponents = Vec::with_capacity(poly_dim(degree));
        for d in 0..=degree {
            for b in 0..=d {
                exponents.push((d - b, b));
            }
        }
        ScaledMonomialBasis {
            center,
            scale,
            degree,
            exponents,
        }
    }

    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn center(&self) -> Point {
        self.center
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn exponents(&self) -> &[(usize, usize)] {
        &self.exponents
    }

    fn powers(&self, p: Point) -> (Vec<f64>, Vec<f64>) {
        let s = (p - self.center) / self.scale;
        let mut px = vec![1.0; self.degree + 1];
        let mut py = vec![1.0; self.degree + 1];
        for i in 1..=self.degree {
            px[i] = px[i - 1] * s.x;
            py[i] = py[i - 1] * s.y;
        }
        (px, py)
    }

    pub fn eval_into(&self, p: Point, out: &mut [f64]) {
        let (px, py) = self.powers(p);
        for (o, &(a, b)) in out.iter_mut().zip(&self.exponents) {
            *o = px[a] * py[b];
        }
    }

    pub fn eval(&self, p: Point) -> Vec<f64> {
        let mut out = vec![0.0; self.len()];
        self.eval_into(p, &mut out);
        out
    }

    /// Gradients of every basis monomial at `p`.
    pub fn grad(&self, p: Point) -> Vec<Point> {
        let (px, py) = self.powers(p);
        let h = self.scale;
        self.exponents
            .iter()
            .map(|&(a, b)| {
                let dx = if a > 0 { a as f64 * px[a - 1] * py[b] / h } else { 0.0 };
                let dy = if b > 0 { b as f64 * px[a] * py[b - 1] / h } else { 0.0 };
                Point::new(dx, dy)
            })
            .collect()
    }

    /// Laplacian of monomial `alpha` as a combination of lower monomials.
    pub fn laplacian(&self, alpha: usize) -> Vec<(usize, f64)> {
        let (a, b) = self.exponents[alpha];
        let h2 = self.scale * self.scale;
        let mut out = Vec::with_capacity(2);
        if a >= 2 {
            out.push((monomial_index(a - 2, b), (a * (a - 1)) as f64 / h2));
        }
        if b >= 2 {
            out.push((monomial_index(a, b - 2), (b * (b - 1)) as f64 / h2));
        }
        out
    }

    /// Evaluates the polynomial with coefficients `coeffs` in this basis.
    pub fn eval_poly(&self, coeffs: &[f64], p: Point) -> f64 {
        let (px, py) = self.powers(p);
        coeffs
            .iter()
            .zip(&self.exponents)
            .map(|(c, &(a, b))| c * px[a] * py[b])
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn graded_ordering() {
        let b = ScaledMonomialBasis::new(Point::zeros(), 1.0, 3);
        assert_eq!(b.len(), 10);
        assert_eq!(
            b.exponents(),
            &[(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2), (3, 0), (2, 1), (1, 2), (0, 3)]
        );
        for (i, &(a, e)) in b.exponents().iter().enumerate() {
            assert_eq!(monomial_index(a, e), i);
        }
    }

    #[test]
    fn values_and_gradients() {
        let b = ScaledMonomialBasis::new(Point::new(0.5, 0.5), 2.0, 2);
        let p = Point::new(1.5, -0.5);
        // scaled coordinates (0.5, -0.5)
        let v = b.eval(p);
        assert_relative_eq!(v.as_slice(), [1.0, 0.5, -0.5, 0.25, -0.25, 0.25].as_slice());
        let g = b.grad(p);
        // d/dx of s_x^2 = 2 s_x / h = 0.5
        assert_relative_eq!(g[3].x, 0.5);
        assert_relative_eq!(g[4].x, -0.25);
        assert_relative_eq!(g[4].y, 0.25);
        // finite differences on every monomial
        let eps = 1e-6;
        for i in 0..b.len() {
            let fd = (b.eval(p + Point::new(eps, 0.0))[i] - b.eval(p - Point::new(eps, 0.0))[i]) / (2.0 * eps);
            assert_relative_eq!(g[i].x, fd, epsilon = 1e-8);
        }
    }

    #[test]
    fn laplacian_of_quadratic() {
        let b = ScaledMonomialBasis::new(Point::zeros(), 0.5, 4);
        // m_(2,2) = s_x^2 s_y^2 -> (2 s_y^2 + 2 s_x^2) / h^2
        let lap = b.laplacian(monomial_index(2, 2));
        assert_eq!(lap, vec![(monomial_index(0, 2), 8.0), (monomial_index(2, 0), 8.0)]);
        assert!(b.laplacian(monomial_index(1, 1)).is_empty());
    }
}

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Point, PolygonalMesh};
use crate::error::{Error, Result};

/// `n x n` axis-aligned squares on the unit square.
pub fn generate_structured_quads(n: usize) -> Result<PolygonalMesh> {
    generate_distorted_quads(n, 0.0, 0)
}

/// `n x n` quadrilaterals on the unit square with interior vertices moved by
/// up to `amplitude / n` in each coordinate.
///
/// Offsets are drawn from a ChaCha8 stream seeded with `seed`, two uniform
/// samples in `[-1, 1)` per interior vertex in row-major order (x first).
/// Boundary vertices stay in place.
pub fn generate_distorted_quads(n: usize, amplitude: f64, seed: u64) -> Result<PolygonalMesh> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    if !(0.0..0.5).contains(&amplitude) {
        return Err(Error::InvalidArgument(format!(
            "distortion amplitude {amplitude} outside [0, 0.5)"
        )));
    }
    let h = 1.0 / n as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut vertices = Vec::with_capacity((n + 1) * (n + 1));
    for j in 0..=n {
        for i in 0..=n {
            let mut p = Point::new(i as f64 * h, j as f64 * h);
            if i == n {
                p.x = 1.0;
            }
            if j == n {
                p.y = 1.0;
            }
            if amplitude > 0.0 && i > 0 && i < n && j > 0 && j < n {
                let dx: f64 = rng.gen_range(-1.0..1.0);
                let dy: f64 = rng.gen_range(-1.0..1.0);
                p += Point::new(dx, dy) * (amplitude * h);
            }
            vertices.push(p);
        }
    }
    let id = |i: usize, j: usize| j * (n + 1) + i;
    let mut cells = Vec::with_capacity(n * n);
    for j in 0..n {
        for i in 0..n {
            cells.push(vec![id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    PolygonalMesh::new(vertices, cells)
}

use super::Point;
use crate::error::{Error, Result};

/// Per-cell geometric data.
#[derive(Debug, Clone, PartialEq)]
pub struct CellGeometry {
    pub area: f64,
    pub centroid: Point,
    /// Maximum pairwise vertex distance.
    pub diameter: f64,
    /// Length of local edge `j` (vertex `j` to `j + 1`).
    pub edge_lengths: Vec<f64>,
    /// Number of distinct straight lines supporting the edges, counted exactly
    /// (collinearity up to round-off).
    pub exact_eta: usize,
    pub convex: bool,
    /// `min_e |e| / h_E`.
    pub regularity_ratio: f64,
    pub star_shaped_from_centroid: bool,
}

pub fn signed_area(points: &[Point]) -> f64 {
    let n = points.len();
    let mut twice = 0.0;
    for i in 0..n {
        let (p, q) = (points[i], points[(i + 1) % n]);
        twice += p.x * q.y - q.x * p.y;
    }
    0.5 * twice
}

fn cross(a: Point, b: Point) -> f64 {
    a.x * b.y - a.y * b.x
}

/// Closed-segment intersection test.
pub fn segments_intersect(p1: Point, p2: Point, q1: Point, q2: Point, tol: f64) -> bool {
    let d1 = cross(p2 - p1, q1 - p1);
    let d2 = cross(p2 - p1, q2 - p1);
    let d3 = cross(q2 - q1, p1 - q1);
    let d4 = cross(q2 - q1, p2 - q1);
    if ((d1 > tol && d2 < -tol) || (d1 < -tol && d2 > tol))
        && ((d3 > tol && d4 < -tol) || (d3 < -tol && d4 > tol))
    {
        return true;
    }
    let on_segment = |a: Point, b: Point, p: Point, d: f64| {
        d.abs() <= tol
            && p.x >= a.x.min(b.x) - tol
            && p.x <= a.x.max(b.x) + tol
            && p.y >= a.y.min(b.y) - tol
            && p.y <= a.y.max(b.y) + tol
    };
    on_segment(p1, p2, q1, d1)
        || on_segment(p1, p2, q2, d2)
        || on_segment(q1, q2, p1, d3)
        || on_segment(q1, q2, p2, d4)
}

/// Shoelace area and centroid plus the derived shape quantities of a cell.
pub fn compute_geometry(points: &[Point]) -> Result<CellGeometry> {
    let n = points.len();
    let invalid = |reason: String| Error::InvalidCell { cell: 0, reason };
    if n < 3 {
        return Err(invalid(format!("{n} vertices")));
    }
    let mut diameter: f64 = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            diameter = diameter.max((points[i] - points[j]).norm());
        }
    }
    if diameter == 0.0 || !diameter.is_finite() {
        return Err(invalid("degenerate extent".into()));
    }
    let edge_lengths: Vec<f64> = (0..n)
        .map(|j| (points[(j + 1) % n] - points[j]).norm())
        .collect();
    let min_edge = edge_lengths.iter().copied().fold(f64::INFINITY, f64::min);
    if min_edge <= 1e-14 * diameter {
        return Err(invalid("repeated vertex (zero-length edge)".into()));
    }

    let area = signed_area(points);
    if area.abs() <= 1e-14 * diameter * diameter {
        return Err(invalid(format!("zero area ({area:e})")));
    }
    if area < 0.0 {
        return Err(Error::Orientation {
            cell: 0,
            signed_area: area,
        });
    }

    let tol = 1e-14 * diameter * diameter;
    for i in 0..n {
        for j in i + 1..n {
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if adjacent {
                continue;
            }
            if segments_intersect(
                points[i],
                points[(i + 1) % n],
                points[j],
                points[(j + 1) % n],
                tol,
            ) {
                return Err(Error::NonSimple {
                    cell: 0,
                    first: i,
                    second: j,
                });
            }
        }
    }

    // centroid relative to the first vertex for round-off
    let o = points[0];
    let (mut cx, mut cy) = (0.0, 0.0);
    for i in 0..n {
        let p = points[i] - o;
        let q = points[(i + 1) % n] - o;
        let c = p.x * q.y - q.x * p.y;
        cx += (p.x + q.x) * c;
        cy += (p.y + q.y) * c;
    }
    let centroid = o + Point::new(cx, cy) / (6.0 * area);

    let convex = (0..n).all(|i| {
        let a = points[(i + 1) % n] - points[i];
        let b = points[(i + 2) % n] - points[(i + 1) % n];
        cross(a, b) >= -1e-12 * diameter * diameter
    });
    let star_shaped_from_centroid = (0..n).all(|i| {
        let a = points[i] - centroid;
        let b = points[(i + 1) % n] - centroid;
        cross(a, b) > 1e-14 * diameter * diameter
    });

    Ok(CellGeometry {
        area,
        centroid,
        diameter,
        exact_eta: count_exact_lines(points, diameter),
        edge_lengths,
        convex,
        regularity_ratio: min_edge / diameter,
        star_shaped_from_centroid,
    })
}

fn count_exact_lines(points: &[Point], diameter: f64) -> usize {
    let n = points.len();
    let mut lines: Vec<(Point, Point)> = Vec::new();
    for j in 0..n {
        let p = points[j];
        let d = (points[(j + 1) % n] - p).normalize();
        let known = lines.iter().any(|&(q, e)| {
            cross(d, e).abs() <= 1e-10 && cross(e, p - q).abs() <= 1e-10 * diameter
        });
        if !known {
            lines.push((p, d));
        }
    }
    lines.len()
}

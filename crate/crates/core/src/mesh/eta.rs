use serde::{Deserialize, Serialize};

use super::Point;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EtaVariant {
    /// Always 3: moments up to degree `k - 3` are kept.
    Lazy,
    /// Consecutive edges turning by less than `theta0` share a line.
    Stingy,
    /// Stingy, after discarding edges shorter than `rho0 * h_E`.
    AdaptiveStingy,
}

/// Rule used to count the straight lines supporting the edges of a cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EtaStrategy {
    pub variant: EtaVariant,
    /// Angle threshold in radians.
    pub theta0: f64,
    /// Edge-ratio threshold.
    pub rho0: f64,
}

impl Default for EtaStrategy {
    fn default() -> Self {
        EtaStrategy {
            variant: EtaVariant::AdaptiveStingy,
            theta0: 0.1,
            rho0: 0.05,
        }
    }
}

impl EtaStrategy {
    pub fn lazy() -> Self {
        EtaStrategy {
            variant: EtaVariant::Lazy,
            ..Default::default()
        }
    }

    pub fn stingy(theta0: f64) -> Self {
        EtaStrategy {
            variant: EtaVariant::Stingy,
            theta0,
            ..Default::default()
        }
    }

    pub fn adaptive_stingy(theta0: f64, rho0: f64) -> Self {
        EtaStrategy {
            variant: EtaVariant::AdaptiveStingy,
            theta0,
            rho0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.theta0 > 0.0) {
            return Err(Error::InvalidArgument(format!("theta0 = {} must be > 0", self.theta0)));
        }
        if !(self.rho0 > 0.0 && self.rho0 < 1.0) {
            return Err(Error::InvalidArgument(format!("rho0 = {} must lie in (0, 1)", self.rho0)));
        }
        Ok(())
    }
}

struct Segment {
    start: Point,
    dir: Point,
}

fn angle_between(a: Point, b: Point) -> f64 {
    let c = a.x * b.y - a.y * b.x;
    let d = a.dot(&b);
    c.atan2(d).abs()
}

fn count_lines(segments: &[Segment], theta0: f64, diameter: f64) -> usize {
    let n = segments.len();
    if n < 3 {
        return 3;
    }
    let Some(start) = (0..n).find(|&i| {
        angle_between(segments[(i + n - 1) % n].dir, segments[i].dir) >= theta0
    }) else {
        return 3;
    };
    let mut groups: Vec<&Segment> = Vec::new();
    for step in 0..n {
        let seg = &segments[(start + step) % n];
        match groups.last() {
            Some(rep) if angle_between(rep.dir, seg.dir) < theta0 => {}
            _ => groups.push(seg),
        }
    }
    // non-consecutive edges lying on (nearly) the same line
    let mut distinct: Vec<&Segment> = Vec::new();
    for g in groups {
        let same = distinct.iter().any(|d| {
            let parallel = angle_between(d.dir, g.dir).min(angle_between(d.dir, -g.dir)) < theta0;
            let off = g.start - d.start;
            let offset = (d.dir.x * off.y - d.dir.y * off.x).abs();
            parallel && offset < theta0 * diameter
        });
        if !same {
            distinct.push(g);
        }
    }
    distinct.len().max(3)
}

/// Number of distinct lines containing the edges of `cell`, as judged by `strategy`.
///
/// Always within `3..=cell.len()`.
pub fn compute_eta(cell: &[Point], strategy: &EtaStrategy) -> usize {
    let n = cell.len();
    if strategy.variant == EtaVariant::Lazy || n <= 3 {
        return 3;
    }
    let mut diameter: f64 = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            diameter = diameter.max((cell[i] - cell[j]).norm());
        }
    }
    let segments: Vec<(Segment, f64)> = (0..n)
        .map(|j| {
            let v = cell[(j + 1) % n] - cell[j];
            let len = v.norm();
            (
                Segment {
                    start: cell[j],
                    dir: v / len,
                },
                len,
            )
        })
        .collect();
    let (all, lengths): (Vec<Segment>, Vec<f64>) = segments.into_iter().unzip();
    let stingy = count_lines(&all, strategy.theta0, diameter).min(n);
    match strategy.variant {
        EtaVariant::Stingy => stingy,
        EtaVariant::AdaptiveStingy => {
            let kept: Vec<Segment> = all
                .into_iter()
                .zip(&lengths)
                .filter(|(_, &l)| l >= strategy.rho0 * diameter)
                .map(|(s, _)| s)
                .collect();
            // dropping edges can only remove lines
            count_lines(&kept, strategy.theta0, diameter).min(stingy)
        }
        EtaVariant::Lazy => unreachable!(),
    }
}

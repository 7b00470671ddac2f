use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use super::problem::Reaction;
use crate::assembly::Discretization;
use crate::error::{Error, Result};

/// Fixed-point fallback: relaxation factor and iteration cap.
const FALLBACK_RELAXATION: f64 = 0.5;
const FALLBACK_MAX_ITER: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarSolve {
    pub value: f64,
    pub iterations: usize,
    pub residual: f64,
    pub fallback: bool,
}

/// Crank–Nicolson step of `u' = -f(u) + g` over a substep of length `s`:
/// finds `u2` with `u2 - u1 + (s/2)(f(u1) + f(u2)) - (s/2)(g1 + g2) = 0`,
/// `gsum = g1 + g2`. Newton from `u1`; damped fixed point if that fails.
///
/// Iterates with residuals of opposite sign bracket a root. A Newton step
/// that leaves the bracket is replaced by bisection, which stops the cycling
/// plain Newton shows when `1 + (s/2) f'` nearly vanishes.
pub fn reaction_scalar_solve(
    u1: f64,
    s: f64,
    f: &Reaction,
    gsum: f64,
    tol: f64,
    max_iter: usize,
) -> std::result::Result<ScalarSolve, f64> {
    let h = 0.5 * s;
    let rhs = u1 - h * f.f(u1) + h * gsum;
    let limit = tol * (1.0 + u1.abs());
    let residual = |u: f64| u + h * f.f(u) - rhs;
    let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
    let mut u = u1;
    let mut r = residual(u);
    let mut it = 0;
    while !(r.abs() <= limit) && it < max_iter {
        if r < 0.0 {
            lo = lo.max(u);
        } else {
            hi = hi.min(u);
        }
        let next = u - r / (1.0 + h * f.df(u));
        u = if next > lo && next < hi {
            next
        } else if lo.is_finite() && hi.is_finite() {
            0.5 * (lo + hi)
        } else {
            next
        };
        r = residual(u);
        it += 1;
        if !u.is_finite() {
            break;
        }
    }
    if r.abs() <= limit {
        return Ok(ScalarSolve {
            value: u,
            iterations: it,
            residual: r.abs(),
            fallback: false,
        });
    }
    let mut u = u1;
    let mut r = residual(u);
    for k in 0..FALLBACK_MAX_ITER {
        u = (1.0 - FALLBACK_RELAXATION) * u + FALLBACK_RELAXATION * (rhs - h * f.f(u));
        r = residual(u);
        if r.abs() <= limit {
            return Ok(ScalarSolve {
                value: u,
                iterations: it + k + 1,
                residual: r.abs(),
                fallback: true,
            });
        }
    }
    Err(r.abs())
}

/// Newton settings shared by both stages.
#[derive(Debug, Clone, Copy)]
pub struct NewtonSettings {
    pub tol: f64,
    pub max_iter: usize,
}

/// Stage 1: every boundary DoF independently. `gsum[i] = g_i(t0) + g_i(t1)`.
pub fn boundary_stage(
    disc: &Discretization,
    u: &DVector<f64>,
    s: f64,
    f: &Reaction,
    gsum: Option<&DVector<f64>>,
    newton: NewtonSettings,
) -> Result<DVector<f64>> {
    let nb = disc.dofs.n_boundary;
    let mut out = u.clone();
    let solved: std::result::Result<Vec<f64>, (usize, f64)> = (0..nb)
        .into_par_iter()
        .with_min_len(1024)
        .map(|i| {
            let g = gsum.map_or(0.0, |g| g[i]);
            reaction_scalar_solve(u[i], s, f, g, newton.tol, newton.max_iter)
                .map(|r| r.value)
                .map_err(|res| (i, res))
        })
        .collect();
    let solved = solved.map_err(|(dof, residual)| Error::ScalarNewton { dof, residual })?;
    out.rows_mut(0, nb).copy_from_slice(&solved);
    Ok(out)
}

/// Residual of the cell-`c` moment equations at moments `z`, with the cell's
/// boundary values held at `boundary`:
/// `z - z1 + (s/2)(F1 + F(z)) - (s/2) gsum`, `F1` the moments of `f` at the
/// substep input.
struct MomentSystem<'a> {
    disc: &'a Discretization,
    c: usize,
    f: &'a Reaction,
    /// `Pi_0 u_h` at the quadrature points from the boundary values alone.
    base: DVector<f64>,
    rhs: DVector<f64>,
    half: f64,
}

impl MomentSystem<'_> {
    fn nb(&self) -> usize {
        self.disc.dofs.layout(self.c).n_boundary()
    }

    fn values(&self, z: &DVector<f64>) -> DVector<f64> {
        let phi = &self.disc.elements[self.c].phi;
        let nb = self.nb();
        &self.base + phi.columns(nb, z.len()) * z
    }

    fn residual(&self, z: &DVector<f64>) -> DVector<f64> {
        let el = &self.disc.elements[self.c].element;
        let v = self.values(z);
        let mut r = z - &self.rhs;
        for (q, &w) in el.rule.weights.iter().enumerate() {
            let fw = self.half * w * self.f.f(v[q]) / el.area;
            for a in 0..z.len() {
                r[a] += fw * el.values[(q, a)];
            }
        }
        r
    }

    /// `I + (s/2)(1/|E|) \int f'(Pi_0 u_h) m_a q_b`.
    fn jacobian(&self, z: &DVector<f64>) -> DMatrix<f64> {
        let el = &self.disc.elements[self.c].element;
        let phi = &self.disc.elements[self.c].phi;
        let nb = self.nb();
        let n = z.len();
        let v = self.values(z);
        let mut j = DMatrix::identity(n, n);
        for (q, &w) in el.rule.weights.iter().enumerate() {
            let dw = self.half * w * self.f.df(v[q]) / el.area;
            for a in 0..n {
                let ma = dw * el.values[(q, a)];
                for b in 0..n {
                    j[(a, b)] += ma * phi[(q, nb + b)];
                }
            }
        }
        j
    }
}

/// Stage 2 on one cell: Newton for the moment DoFs of cell `c`. `input` is
/// the substep input, `stage1` the output of the boundary stage.
pub fn local_moment_solve(
    disc: &Discretization,
    c: usize,
    input: &DVector<f64>,
    stage1: &DVector<f64>,
    s: f64,
    f: &Reaction,
    gsum: Option<&DVector<f64>>,
    newton: NewtonSettings,
) -> Result<DVector<f64>> {
    let range = disc.dofs.moments(c);
    let n = range.len();
    let nb = disc.dofs.layout(c).n_boundary();
    let half = 0.5 * s;
    let z1 = input.rows(range.start, n).into_owned();
    let f1 = DVector::from_vec(disc.cell_reaction_moments(c, input, |v| f.f(v), n));
    let mut rhs = &z1 - &f1 * half;
    if let Some(g) = gsum {
        rhs += g.rows(range.start, n) * half;
    }
    let local = disc.gather(c, stage1);
    let phi = &disc.elements[c].phi;
    let base = phi.columns(0, nb) * local.rows(0, nb);
    let sys = MomentSystem {
        disc,
        c,
        f,
        base,
        rhs,
        half,
    };
    let mut z = z1.clone();
    let limit = newton.tol * (1.0 + z1.amax());
    let mut r = sys.residual(&z);
    let mut it = 0;
    while !(r.amax() <= limit) && it < newton.max_iter {
        let dz = sys
            .jacobian(&z)
            .lu()
            .solve(&r)
            .ok_or(Error::LocalNewton { cell: c, residual: r.amax() })?;
        z -= dz;
        r = sys.residual(&z);
        it += 1;
    }
    if !(r.amax() <= limit) {
        return Err(Error::LocalNewton { cell: c, residual: r.amax() });
    }
    Ok(z)
}

/// Both stages of the interpolatory reaction substep.
pub fn reaction_substep(
    disc: &Discretization,
    u: &DVector<f64>,
    s: f64,
    f: &Reaction,
    gsum: Option<&DVector<f64>>,
    newton: NewtonSettings,
) -> Result<DVector<f64>> {
    let mut out = boundary_stage(disc, u, s, f, gsum, newton)?;
    let cells: Vec<usize> = disc.dofs.cells_with_moments().collect();
    if cells.is_empty() {
        return Ok(out);
    }
    let moments: Vec<DVector<f64>> = cells
        .par_iter()
        .map(|&c| local_moment_solve(disc, c, u, &out, s, f, gsum, newton))
        .collect::<Result<_>>()?;
    for (&c, z) in cells.iter().zip(moments) {
        let start = disc.dofs.moment_start[c];
        out.rows_mut(start, z.len()).copy_from_slice(z.as_slice());
    }
    Ok(out)
}

use nalgebra::DVector;
use rayon::prelude::*;

use super::problem::Reaction;
use crate::assembly::Discretization;
use crate::error::{Error, Result};
use crate::linalg::SpdSolver;

/// Fixed-point tolerance of the coupled iteration.
pub const BASELINE_TOL: f64 = 1e-10;

/// Load vector `F_i = \sum_E \int_E f(Pi_0 u_h) Pi_0 phi_i`, the quadrature
/// realization of `(Pi_0 f(Pi_0 u_h), v_h)`.
pub fn quadrature_load(disc: &Discretization, u: &DVector<f64>, f: impl Fn(f64) -> f64 + Sync) -> DVector<f64> {
    let parts: Vec<DVector<f64>> = (0..disc.elements.len())
        .into_par_iter()
        .with_min_len(64)
        .map(|c| {
            let el = &disc.elements[c];
            let v = disc.cell_values(c, u);
            let fw = DVector::from_iterator(v.len(), v.iter().zip(&el.element.rule.weights).map(|(x, w)| w * f(*x)));
            el.phi.tr_mul(&fw)
        })
        .collect();
    scatter(disc, &parts)
}

/// `M U^{(j+1)} = M U^{(1)} - (s/2)(F(U^{(1)}) + F(U^{(j)})) + (s/2) G`,
/// iterated without damping until the update is below [`BASELINE_TOL`].
/// `load_sum` is the source load summed over the substep endpoints.
/// Returns the state and the iteration count.
pub fn coupled_baseline_reaction(
    disc: &Discretization,
    mass_solver: &SpdSolver,
    u: &DVector<f64>,
    s: f64,
    f: &Reaction,
    load_sum: Option<&DVector<f64>>,
    max_iter: usize,
) -> Result<(DVector<f64>, usize)> {
    let half = 0.5 * s;
    let mu = crate::linalg::mul(&disc.mass, u);
    let mut fixed = mu - quadrature_load(disc, u, |v| f.f(v)) * half;
    if let Some(g) = load_sum {
        fixed += g * half;
    }
    let mut cur = u.clone();
    let mut increment = f64::INFINITY;
    for it in 1..=max_iter {
        let b = &fixed - quadrature_load(disc, &cur, |v| f.f(v)) * half;
        let next = mass_solver.solve(&b, Some(&cur))?;
        increment = (&next - &cur).amax();
        let scale = 1.0 + next.amax();
        cur = next;
        if increment <= BASELINE_TOL * scale {
            return Ok((cur, it));
        }
    }
    Err(Error::CoupledIteration {
        increment,
        iterations: max_iter,
    })
}

/// Load vector `\sum_E \int_E g Pi_0 phi_i` of a source term.
pub fn source_load(disc: &Discretization, g: impl Fn(crate::mesh::Point) -> f64 + Sync) -> DVector<f64> {
    let parts: Vec<DVector<f64>> = (0..disc.elements.len())
        .into_par_iter()
        .with_min_len(64)
        .map(|c| {
            let el = &disc.elements[c];
            let rule = &el.element.rule;
            let gw = DVector::from_iterator(rule.len(), rule.points.iter().zip(&rule.weights).map(|(p, w)| w * g(*p)));
            el.phi.tr_mul(&gw)
        })
        .collect();
    scatter(disc, &parts)
}

fn scatter(disc: &Discretization, parts: &[DVector<f64>]) -> DVector<f64> {
    let mut out = DVector::zeros(disc.len());
    for (c, part) in parts.iter().enumerate() {
        for (l, &g) in disc.dofs.cell_dofs(c).iter().enumerate() {
            out[g] += part[l];
        }
    }
    out
}

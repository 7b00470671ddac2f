use std::f64::consts::PI;

use approx::assert_relative_eq;
use nalgebra::{DMatrix, DVector};

use super::*;
use crate::assembly::{Discretization, StateVector};
use crate::linalg::{mul, LinearSolveMode, SpdSolver};
use crate::mesh::{generate_distorted_quads, generate_structured_quads, EtaStrategy, Point, PolygonalMesh};
use crate::projectors::SpaceKind;

const NEWTON: NewtonSettings = NewtonSettings { tol: 1e-10, max_iter: 50 };

fn disc(mesh: PolygonalMesh, k: usize, kind: SpaceKind) -> Discretization {
    Discretization::new(mesh, k, &EtaStrategy::default(), kind).unwrap()
}

fn heat(eps: f64) -> ProblemSpec {
    ProblemSpec::new(Reaction::Zero, eps, |p: Point| (PI * p.x).cos())
}

#[test]
fn constants_and_mass_survive_diffusion() {
    let d = disc(generate_distorted_quads(4, 0.2, 9).unwrap(), 3, SpaceKind::Serendipity);
    let op = LinearStepOperator::new(&d, 1.0, 0.1, LinearSolveMode::Direct).unwrap();
    let one = d.constants();
    assert!((op.apply(&one).unwrap() - &one).amax() <= 1e-13);
    let u = d.interpolate(|p| (3.0 * p.x).sin() * p.y + p.x * p.x);
    let v = op.apply(&u).unwrap();
    let (m0, m1) = (one.dot(&mul(&d.mass, &u)), one.dot(&mul(&d.mass, &v)));
    assert!((m0 - m1).abs() <= 1e-12 * m0.abs());
}

#[test]
fn cosine_mode_decays_at_the_continuous_rate() {
    let d = disc(generate_structured_quads(16).unwrap(), 2, SpaceKind::Serendipity);
    let s = 0.01;
    let lambda = PI * PI;
    let op = LinearStepOperator::new(&d, 1.0, s, LinearSolveMode::Direct).unwrap();
    let u = d.interpolate(|p| (PI * p.x).cos());
    let v = op.apply(&u).unwrap();
    let ratio = d.l2_norm(&v) / d.l2_norm(&u);
    let cn = (1.0 - 0.5 * s * lambda) / (1.0 + 0.5 * s * lambda);
    assert!((ratio / (-s * lambda).exp() - 1.0).abs() < 0.02, "{ratio}");
    assert!((ratio / cn - 1.0).abs() < 0.02);
}

#[test]
fn iterative_and_direct_diffusion_agree() {
    let d = disc(generate_distorted_quads(8, 0.2, 4).unwrap(), 4, SpaceKind::Serendipity);
    let u = d.interpolate(|p| (PI * p.x).cos() * p.y);
    let a = LinearStepOperator::new(&d, 0.5, 0.05, LinearSolveMode::Direct).unwrap();
    let b = LinearStepOperator::new(&d, 0.5, 0.05, LinearSolveMode::Iterative { tol: 1e-12 }).unwrap();
    assert!((a.apply(&u).unwrap() - b.apply(&u).unwrap()).amax() <= 1e-9);
}

#[test]
fn scalar_solve_closed_forms() {
    let r = reaction_scalar_solve(0.7, 0.1, &Reaction::Zero, 0.0, 1e-10, 50).unwrap();
    assert_eq!(r.value, 0.7);
    for lambda in [-3.0, 0.5, 8.0] {
        let (u1, s) = (1.3, 0.2);
        let r = reaction_scalar_solve(u1, s, &Reaction::Linear { lambda }, 0.0, 1e-10, 50).unwrap();
        let exact = u1 * (1.0 - 0.5 * s * lambda) / (1.0 + 0.5 * s * lambda);
        assert_relative_eq!(r.value, exact, epsilon = 1e-14);
        assert!(r.iterations <= 1);
    }
}

/// Bisection on the scalar Crank–Nicolson equation.
fn bisection(u1: f64, s: f64, f: impl Fn(f64) -> f64) -> f64 {
    let g = |u: f64| u - u1 + 0.5 * s * (f(u1) + f(u));
    let (mut a, mut b) = (u1 - 1.0, u1 + 1.0);
    assert!(g(a) * g(b) < 0.0);
    for _ in 0..200 {
        let c = 0.5 * (a + b);
        if g(a) * g(c) <= 0.0 {
            b = c;
        } else {
            a = c;
        }
    }
    0.5 * (a + b)
}

#[test]
fn scalar_solve_matches_bisection() {
    let r = reaction_scalar_solve(0.5, 0.005, &Reaction::AllenCahn, 0.0, 1e-10, 50).unwrap();
    let oracle = bisection(0.5, 0.005, |u| u * u * u - u);
    assert!((r.value - oracle).abs() <= 1e-12, "{} vs {oracle}", r.value);
    assert!(!r.fallback);
}

#[test]
fn scalar_solve_with_source() {
    // u' = -u + 2: from rest, CN gives u2 = (s/2)(g1 + g2) / (1 + s/2)
    let s = 0.1;
    let r = reaction_scalar_solve(0.0, s, &Reaction::Linear { lambda: 1.0 }, 4.0, 1e-12, 50).unwrap();
    assert_relative_eq!(r.value, 0.5 * s * 4.0 / (1.0 + 0.5 * s), epsilon = 1e-14);
}

#[test]
fn ideal_meshes_skip_the_moment_stage() {
    let d = disc(generate_distorted_quads(4, 0.2, 1).unwrap(), 3, SpaceKind::Serendipity);
    assert_eq!(d.dofs.cells_with_moments().count(), 0);
    let u = d.interpolate(|p| p.x - p.y);
    let full = reaction_substep(&d, &u, 0.1, &Reaction::AllenCahn, None, NEWTON).unwrap();
    let stage1 = boundary_stage(&d, &u, 0.1, &Reaction::AllenCahn, None, NEWTON).unwrap();
    assert_eq!(full, stage1);
}

#[test]
fn identity_reaction_is_a_linear_contraction() {
    let d = disc(generate_structured_quads(3).unwrap(), 4, SpaceKind::Serendipity);
    let u = d.interpolate(|p| (2.0 * p.x).cos() + p.y.powi(3));
    let s = 0.3;
    let out = reaction_substep(&d, &u, s, &Reaction::Linear { lambda: 1.0 }, None, NEWTON).unwrap();
    let expect = &u * ((1.0 - 0.5 * s) / (1.0 + 0.5 * s));
    assert!((out - expect).amax() <= 1e-12);
}

#[test]
fn stage_one_is_entry_local() {
    let d = disc(generate_structured_quads(3).unwrap(), 4, SpaceKind::Serendipity);
    let u = d.interpolate(|p| p.x * p.y);
    let base = boundary_stage(&d, &u, 0.1, &Reaction::AllenCahn, None, NEWTON).unwrap();
    let mut w = u.clone();
    w[5] += 0.3;
    let moved = boundary_stage(&d, &w, 0.1, &Reaction::AllenCahn, None, NEWTON).unwrap();
    for i in 0..d.len() {
        assert_eq!(moved[i] != base[i], i == 5, "entry {i}");
    }
}

#[test]
fn stage_two_stays_in_the_cell() {
    let d = disc(generate_structured_quads(3).unwrap(), 4, SpaceKind::Serendipity);
    let u = d.interpolate(|p| p.x * p.y);
    let base = reaction_substep(&d, &u, 0.1, &Reaction::AllenCahn, None, NEWTON).unwrap();
    let mut w = u.clone();
    let cell = 4;
    let m = d.dofs.moment_start[cell];
    w[m] += 0.3;
    let moved = reaction_substep(&d, &w, 0.1, &Reaction::AllenCahn, None, NEWTON).unwrap();
    for i in 0..d.len() {
        assert_eq!(moved[i] != base[i], i == m, "entry {i}");
    }
}

/// Dense Newton with a finite-difference Jacobian on the moment residual
/// written through the global interpolatory vector.
pub(crate) fn finite_difference_moment_oracle(
    d: &Discretization,
    c: usize,
    input: &DVector<f64>,
    stage1: &DVector<f64>,
    s: f64,
    f: Reaction,
) -> DVector<f64> {
    let range = d.dofs.moments(c);
    let n = range.len();
    let f_in = d.nonlinear_dof_vector(input, |v| f.f(v)).unwrap();
    let residual = |z: &DVector<f64>| -> DVector<f64> {
        let mut w = stage1.clone();
        w.rows_mut(range.start, n).copy_from(z);
        let fw = d.nonlinear_dof_vector(&w, |v| f.f(v)).unwrap();
        DVector::from_fn(n, |a, _| {
            let i = range.start + a;
            z[a] - input[i] + 0.5 * s * (f_in[i] + fw[i])
        })
    };
    let mut z = input.rows(range.start, n).into_owned();
    for _ in 0..50 {
        let r = residual(&z);
        if r.amax() < 1e-13 {
            break;
        }
        let h = 1e-7;
        let mut jac = DMatrix::zeros(n, n);
        for b in 0..n {
            let mut zp = z.clone();
            zp[b] += h;
            let mut zm = z.clone();
            zm[b] -= h;
            jac.set_column(b, &((residual(&zp) - residual(&zm)) / (2.0 * h)));
        }
        z -= jac.lu().solve(&r).unwrap();
    }
    z
}

#[test]
fn moment_newton_matches_finite_difference_oracle() {
    let d = disc(generate_structured_quads(3).unwrap(), 5, SpaceKind::Serendipity);
    let input = d.interpolate(|p| 1.5 * (3.0 * p.x).cos() * (2.0 * p.y).sin());
    let s = 0.2;
    let f = Reaction::AllenCahn;
    let stage1 = boundary_stage(&d, &input, s, &f, None, NEWTON).unwrap();
    for c in d.dofs.cells_with_moments() {
        let z = local_moment_solve(&d, c, &input, &stage1, s, &f, None, NEWTON).unwrap();
        let oracle = finite_difference_moment_oracle(&d, c, &input, &stage1, s, f);
        assert_eq!(z.len(), 3);
        assert!((&z - &oracle).amax() <= 1e-8, "cell {c}");
    }
}

#[test]
fn splittings_without_reaction() {
    let d = disc(generate_distorted_quads(4, 0.2, 3).unwrap(), 2, SpaceKind::Serendipity);
    let p = heat(0.1);
    let tau = 0.01;
    let u0 = d.interpolate_state(|x| (p.initial)(x), 0.0);

    let mut drd = Stepper::new(&d, &p, SplittingConfig::new(Splitting::Drd, tau, tau)).unwrap();
    let a = drd.step(&u0).unwrap();
    let half = LinearStepOperator::new(&d, 0.1, 0.5 * tau, LinearSolveMode::Direct).unwrap();
    let twice = half.apply(&half.apply(&u0.values).unwrap()).unwrap();
    assert_eq!(a.values, twice);

    let mut rdr = Stepper::new(&d, &p, SplittingConfig::new(Splitting::Rdr, tau, tau)).unwrap();
    let b = rdr.step(&u0).unwrap();
    let full = LinearStepOperator::new(&d, 0.1, tau, LinearSolveMode::Direct).unwrap();
    assert_eq!(b.values, full.apply(&u0.values).unwrap());
    // the two rational approximations of the heat semigroup differ by O(tau^3)
    let gap = (&a.values - &b.values).amax();
    let mut rdr2 = Stepper::new(&d, &p, SplittingConfig::new(Splitting::Rdr, 0.5 * tau, 0.5 * tau)).unwrap();
    let mut drd2 = Stepper::new(&d, &p, SplittingConfig::new(Splitting::Drd, 0.5 * tau, 0.5 * tau)).unwrap();
    let gap2 = (drd2.step(&u0).unwrap().values - rdr2.step(&u0).unwrap().values).amax();
    assert!(gap2 < gap / 6.0, "{gap} {gap2}");
}

#[test]
fn run_counts_steps_and_observes() {
    let d = disc(generate_structured_quads(2).unwrap(), 2, SpaceKind::Serendipity);
    let p = ProblemSpec::new(Reaction::AllenCahn, 0.01, |_| 0.0);
    let mut st = Stepper::new(&d, &p, SplittingConfig::new(Splitting::Rdr, 0.1, 0.1)).unwrap();
    let out = st.run(d.interpolate_state(|_| 0.0, 0.0), &[], |_| {}).unwrap();
    assert_eq!(st.times.steps, 1);
    assert_eq!(out.values.amax(), 0.0);
    assert_eq!(out.time, 0.1);

    let mut st = Stepper::new(&d, &p, SplittingConfig::new(Splitting::Drd, 0.1, 1.0)).unwrap();
    let mut seen = vec![];
    st.run(d.interpolate_state(|x| x.x, 0.0), &[0.0, 0.3, 1.0, 7.0], |u| seen.push(u.time)).unwrap();
    assert_eq!(seen.len(), 3);
    assert_relative_eq!(seen[1], 0.3, epsilon = 1e-12);

    let bad = SplittingConfig::new(Splitting::Drd, 0.3, 1.0);
    let mut st = Stepper::new(&d, &p, bad).unwrap();
    assert_eq!(st.run(d.interpolate_state(|_| 0.0, 0.0), &[], |_| {}).unwrap_err().code(), 3);
}

#[test]
fn runs_are_deterministic() {
    let d = disc(generate_distorted_quads(4, 0.2, 8).unwrap(), 4, SpaceKind::Serendipity);
    let p = ProblemSpec::new(Reaction::AllenCahn, 0.01, |x: Point| (2.0 * PI * x.x * x.x).cos());
    let cfg = SplittingConfig::new(Splitting::Rdr, 0.01, 0.05);
    let go = || {
        let mut st = Stepper::new(&d, &p, cfg).unwrap();
        st.run(d.interpolate_state(|x| (p.initial)(x), 0.0), &[], |_| {}).unwrap()
    };
    let (a, b) = (go(), go());
    assert!(a.values.iter().zip(b.values.iter()).all(|(x, y)| x.to_bits() == y.to_bits()));
}

#[test]
fn coupled_baseline_special_cases() {
    let d = disc(generate_distorted_quads(4, 0.2, 2).unwrap(), 2, SpaceKind::Enhanced);
    let solver = SpdSolver::new(&d.mass, LinearSolveMode::Direct).unwrap();
    let u = d.interpolate(|p| p.x + p.y * p.y);
    let (v, it) = coupled_baseline_reaction(&d, &solver, &u, 0.1, &Reaction::Zero, None, 100).unwrap();
    assert!((&v - &u).amax() <= 1e-12);
    assert_eq!(it, 1);

    let c = d.interpolate(|_| 0.8);
    let s = 0.2;
    let (v, _) = coupled_baseline_reaction(&d, &solver, &c, s, &Reaction::Linear { lambda: 1.0 }, None, 100).unwrap();
    let ser = disc(generate_distorted_quads(4, 0.2, 2).unwrap(), 2, SpaceKind::Serendipity);
    let w = reaction_substep(&ser, &ser.interpolate(|_| 0.8), s, &Reaction::Linear { lambda: 1.0 }, None, NEWTON).unwrap();
    assert!((v.amax() - w.amax()).abs() <= 1e-9);
    assert!((v.amax() - v.amin()).abs() <= 1e-9);

    // a strongly nonlinear substep exhausts a tiny iteration cap
    let err = coupled_baseline_reaction(&d, &solver, &u, 0.1, &Reaction::AllenCahn, None, 2).unwrap_err();
    assert_eq!(err.code(), 43);
}

#[test]
fn newton_converges_fast_below_the_bound() {
    for &u1 in &[-9.0, -1.2, 0.0, 0.4, 3.3, 10.0] {
        for &s in &[0.1, 1.0, 1.9] {
            let r = reaction_scalar_solve(u1, s, &Reaction::Sine, 0.0, 1e-10, 50).unwrap();
            assert!(r.iterations <= 10 && !r.fallback, "u1 = {u1}, s = {s}: {r:?}");
        }
    }
}

#[test]
fn newton_stays_bracketed_near_the_bound() {
    // plain Newton cycles here; the bracket keeps it convergent
    for i in 0..2001 {
        let u1 = -10.0 + 0.01 * i as f64;
        let r = reaction_scalar_solve(u1, 1.999, &Reaction::Sine, 0.0, 1e-10, 50).unwrap();
        assert!(!r.fallback && r.iterations <= 20, "u1 = {u1}: {r:?}");
        assert!(r.residual <= 1e-10 * (1.0 + u1.abs()));
    }
}

#[test]
fn constant_states_of_the_step() {
    // zero reaction keeps a constant state fixed through a full run
    let d = disc(generate_distorted_quads(4, 0.2, 6).unwrap(), 4, SpaceKind::Serendipity);
    let p = heat(1.0);
    let mut st = Stepper::new(&d, &p, SplittingConfig::new(Splitting::Drd, 0.1, 0.5)).unwrap();
    let u0 = StateVector::new(d.constants() * 3.0, 0.0);
    let u = st.run(u0.clone(), &[], |_| {}).unwrap();
    assert!((u.values - u0.values).amax() <= 1e-12);
}

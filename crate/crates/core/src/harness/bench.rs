use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::run::simulate;
use super::scenario::{problem, ProblemKind, Scenario};
use crate::assembly::Discretization;
use crate::error::{Error, Result};
use crate::fixtures::{MeshFamily, DEFAULT_SEED, LEVELS};
use crate::mesh::EtaStrategy;
use crate::projectors::SpaceKind;
use crate::timestep::{ReactionMode, Splitting, SplittingConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BenchMode {
    /// Serendipity space, entry-wise and cell-local reaction solves.
    Interpolatory,
    /// Enhanced moment layout, mass-coupled fixed point with quadrature loads.
    Coupled,
}

impl std::str::FromStr for BenchMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "interp" | "interpolatory" => Ok(BenchMode::Interpolatory),
            "coupled" | "coupled_baseline" => Ok(BenchMode::Coupled),
            other => Err(Error::InvalidArgument(format!("unknown benchmark mode {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub family: MeshFamily,
    pub level: usize,
    pub k: usize,
    pub steps: usize,
    pub tau: f64,
    pub repeats: usize,
    /// Worker threads; 1 is the single-threaded measurement.
    pub threads: usize,
    pub seed: u64,
}

impl BenchConfig {
    /// Accuracy problem, 10 RDR steps of `1e-2` on the finest mesh of
    /// `family`, best of 3, one thread.
    pub fn new(family: MeshFamily, k: usize) -> Self {
        BenchConfig {
            family,
            level: LEVELS - 1,
            k,
            steps: 10,
            tau: 1e-2,
            repeats: 3,
            threads: 1,
            seed: DEFAULT_SEED,
        }
    }
}

/// Best-of-`repeats` phase timings in seconds; each phase minimized on its own.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchResult {
    pub mode: BenchMode,
    pub mesh: String,
    pub k: usize,
    pub dofs: usize,
    pub steps: usize,
    pub threads: usize,
    pub linear: f64,
    pub nonlinear: f64,
    pub total: f64,
    pub baseline_iterations: usize,
    #[serde(skip)]
    pub final_state: DVector<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchComparison {
    pub interpolatory: BenchResult,
    pub coupled: BenchResult,
    /// Coupled over interpolatory nonlinear time.
    pub nonlinear_ratio: f64,
    /// L2 distance of the two final `Pi_0 u_h`.
    pub discrepancy: f64,
}

fn discretization(cfg: &BenchConfig, mode: BenchMode) -> Result<Discretization> {
    let mesh = cfg.family.mesh(cfg.level, cfg.seed)?;
    let kind = match mode {
        BenchMode::Interpolatory => SpaceKind::Serendipity,
        BenchMode::Coupled => SpaceKind::Enhanced,
    };
    Discretization::new(mesh, cfg.k, &EtaStrategy::default(), kind)
}

fn scenario(cfg: &BenchConfig, mode: BenchMode, disc: &Discretization) -> Scenario {
    let mut splitting = SplittingConfig::new(Splitting::Rdr, cfg.tau, cfg.tau * cfg.steps as f64);
    splitting.reaction_mode = match mode {
        BenchMode::Interpolatory => ReactionMode::Interpolatory,
        BenchMode::Coupled => ReactionMode::CoupledBaseline,
    };
    Scenario {
        name: format!("bench_{mode:?}").to_lowercase(),
        mesh_name: cfg.family.level_name(cfg.level),
        mesh: disc.mesh.clone(),
        kind: ProblemKind::Accuracy,
        problem: problem(ProblemKind::Accuracy),
        k: cfg.k,
        space: disc.dofs.kind,
        eta: EtaStrategy::default(),
        splitting,
        output_times: vec![],
        tau_constant: None,
    }
}

/// Runs `f` on a dedicated pool of `threads` workers.
pub fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::Internal(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

fn measure(cfg: &BenchConfig, mode: BenchMode, disc: &Discretization) -> Result<BenchResult> {
    if cfg.repeats == 0 || cfg.steps == 0 {
        return Err(Error::InvalidArgument("benchmark needs at least one repeat and one step".into()));
    }
    let scn = scenario(cfg, mode, disc);
    let mut best: Option<BenchResult> = None;
    for _ in 0..cfg.repeats {
        let o = with_threads(cfg.threads, || simulate(&scn, disc, |_| {}))??;
        let t = o.times;
        best = Some(match best {
            None => BenchResult {
                mode,
                mesh: scn.mesh_name.clone(),
                k: cfg.k,
                dofs: disc.len(),
                steps: t.steps,
                threads: cfg.threads,
                linear: t.linear,
                nonlinear: t.nonlinear,
                total: t.total,
                baseline_iterations: t.baseline_iterations,
                final_state: o.state.values,
            },
            Some(b) => BenchResult {
                linear: b.linear.min(t.linear),
                nonlinear: b.nonlinear.min(t.nonlinear),
                total: b.total.min(t.total),
                ..b
            },
        });
    }
    Ok(best.expect("at least one repeat"))
}

pub fn benchmark(cfg: &BenchConfig, mode: BenchMode) -> Result<BenchResult> {
    let disc = discretization(cfg, mode)?;
    measure(cfg, mode, &disc)
}

/// Both modes on identical data, with the nonlinear-time ratio.
pub fn compare(cfg: &BenchConfig) -> Result<BenchComparison> {
    let di = discretization(cfg, BenchMode::Interpolatory)?;
    let dc = discretization(cfg, BenchMode::Coupled)?;
    let interpolatory = measure(cfg, BenchMode::Interpolatory, &di)?;
    let coupled = measure(cfg, BenchMode::Coupled, &dc)?;
    let discrepancy = l2_distance(&di, &interpolatory.final_state, &dc, &coupled.final_state)?;
    Ok(BenchComparison {
        nonlinear_ratio: coupled.nonlinear / interpolatory.nonlinear,
        interpolatory,
        coupled,
        discrepancy,
    })
}

/// `||Pi_0 u - Pi_0 v||_{L2}` for states of two discretizations of one mesh.
pub fn l2_distance(a: &Discretization, u: &DVector<f64>, b: &Discretization, v: &DVector<f64>) -> Result<f64> {
    if a.mesh.num_cells() != b.mesh.num_cells() || a.k() != b.k() {
        return Err(Error::InvalidArgument("discretizations differ in mesh or degree".into()));
    }
    let mut sum = 0.0;
    for c in 0..a.mesh.num_cells() {
        let w = &a.elements[c].element.rule.weights;
        let (x, y) = (a.cell_values(c, u), b.cell_values(c, v));
        sum += w.iter().zip(x.iter().zip(y.iter())).map(|(w, (p, q))| w * (p - q) * (p - q)).sum::<f64>();
    }
    Ok(sum.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_comparison() {
        let cfg = BenchConfig {
            level: 0,
            steps: 2,
            repeats: 2,
            ..BenchConfig::new(MeshFamily::Distorted, 2)
        };
        let c = compare(&cfg).unwrap();
        assert_eq!(c.interpolatory.steps, 2);
        assert!(c.coupled.dofs > c.interpolatory.dofs);
        assert!(c.coupled.baseline_iterations > 0);
        assert_eq!(c.interpolatory.baseline_iterations, 0);
        assert!(c.discrepancy < 1e-2, "{}", c.discrepancy);
        assert!(c.nonlinear_ratio.is_finite());
    }

    #[test]
    fn mode_names() {
        assert_eq!("interp".parse::<BenchMode>().unwrap(), BenchMode::Interpolatory);
        assert_eq!("coupled".parse::<BenchMode>().unwrap(), BenchMode::Coupled);
        assert!("x".parse::<BenchMode>().is_err());
    }
}

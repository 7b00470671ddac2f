use std::f64::consts::PI;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::assembly::Discretization;
use crate::error::{Error, Result};
use crate::fixtures::{MeshFamily, DEFAULT_SEED};
use crate::mesh::{import_mesh, EtaStrategy, Point, PolygonalMesh};
use crate::projectors::SpaceKind;
use crate::timestep::{ProblemSpec, Reaction, Splitting, SplittingConfig};

/// Default `c` in `tau = c h^{(k+1)/2}`.
pub const TAU_CONSTANT: f64 = 0.5;

/// Allen–Cahn output times.
pub const ALLEN_CAHN_SNAPSHOTS: [f64; 4] = [0.1, 5.0, 10.0, 22.5];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemKind {
    /// Manufactured `u = e^{-t} cos(pi x) cos(pi y)` with `f(u) = 1/(1+u^2)`.
    Accuracy,
    /// Same exact solution, `f = 0`.
    Heat,
    /// `f(u) = u^3 - u`, `eps = 0.01`.
    AllenCahn,
}

impl std::str::FromStr for ProblemKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "accuracy" => Ok(ProblemKind::Accuracy),
            "heat" => Ok(ProblemKind::Heat),
            "allen_cahn" | "allen-cahn" => Ok(ProblemKind::AllenCahn),
            other => Err(Error::InvalidArgument(format!("unknown scenario {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MeshSource {
    Family {
        family: MeshFamily,
        level: usize,
    },
    File {
        file: PathBuf,
    },
}

impl MeshSource {
    pub fn load(&self, seed: u64) -> Result<PolygonalMesh> {
        match self {
            MeshSource::Family { family, level } => family.mesh(*level, seed),
            MeshSource::File { file } => import_mesh(file),
        }
    }

    pub fn name(&self) -> String {
        match self {
            MeshSource::Family { family, level } => family.level_name(*level),
            MeshSource::File { file } => file.display().to_string(),
        }
    }
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

fn default_space() -> SpaceKind {
    SpaceKind::Serendipity
}

/// JSON form of a [`Scenario`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    pub problem: ProblemKind,
    pub mesh: MeshSource,
    pub k: usize,
    #[serde(default = "default_space")]
    pub space: SpaceKind,
    #[serde(default)]
    pub eta: EtaStrategy,
    #[serde(default)]
    pub splitting: SplittingConfig,
    /// Overrides the problem's diffusion coefficient.
    #[serde(default)]
    pub eps: Option<f64>,
    #[serde(default)]
    pub output_times: Vec<f64>,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Everything needed for one run.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub mesh_name: String,
    pub mesh: PolygonalMesh,
    pub kind: ProblemKind,
    pub problem: ProblemSpec,
    pub k: usize,
    pub space: SpaceKind,
    pub eta: EtaStrategy,
    pub splitting: SplittingConfig,
    pub output_times: Vec<f64>,
    /// `c` used to couple `tau` to `h`, when it was.
    pub tau_constant: Option<f64>,
}

impl Scenario {
    pub fn from_config(cfg: &ScenarioConfig) -> Result<Self> {
        if !(1..=6).contains(&cfg.k) {
            return Err(Error::Config(format!("k must lie in 1..=6, got {}", cfg.k)));
        }
        cfg.eta.validate()?;
        cfg.splitting.validate()?;
        let mut problem = problem(cfg.problem);
        if let Some(eps) = cfg.eps {
            if !(eps > 0.0) {
                return Err(Error::Config(format!("eps must be positive, got {eps}")));
            }
            problem.eps = eps;
        }
        Ok(Scenario {
            name: cfg.name.clone(),
            mesh_name: cfg.mesh.name(),
            mesh: cfg.mesh.load(cfg.seed)?,
            kind: cfg.problem,
            problem,
            k: cfg.k,
            space: cfg.space,
            eta: cfg.eta,
            splitting: cfg.splitting,
            output_times: cfg.output_times.clone(),
            tau_constant: None,
        })
    }

    pub fn discretize(&self) -> Result<Discretization> {
        Discretization::new(self.mesh.clone(), self.k, &self.eta, self.space)
    }
}

/// `e^{-t} cos(pi x) cos(pi y)`.
pub fn manufactured_solution(p: Point, t: f64) -> f64 {
    (-t).exp() * (PI * p.x).cos() * (PI * p.y).cos()
}

/// `u_t - Lap u + f(u)` for the manufactured solution.
pub fn manufactured_source(reaction: Reaction, p: Point, t: f64) -> f64 {
    let u = manufactured_solution(p, t);
    (2.0 * PI * PI - 1.0) * u + reaction.f(u)
}

pub fn allen_cahn_initial(p: Point) -> f64 {
    (2.0 * PI * p.x * p.x).cos() * (2.0 * PI * p.y * p.y).cos()
}

pub fn problem(kind: ProblemKind) -> ProblemSpec {
    match kind {
        ProblemKind::Accuracy | ProblemKind::Heat => {
            let reaction = if kind == ProblemKind::Accuracy {
                Reaction::Rational
            } else {
                Reaction::Zero
            };
            ProblemSpec::new(reaction, 1.0, |p| manufactured_solution(p, 0.0))
                .with_source(move |p, t| manufactured_source(reaction, p, t))
                .with_exact(manufactured_solution)
        }
        ProblemKind::AllenCahn => ProblemSpec::new(Reaction::AllenCahn, 0.01, allen_cahn_initial),
    }
}

/// Largest `tau <= c h^{(k+1)/2}` dividing `final_time` into whole steps.
pub fn coupled_time_step(h: f64, k: usize, c: f64, final_time: f64) -> f64 {
    let target = c * h.powf(0.5 * (k as f64 + 1.0));
    let n = (final_time / target).ceil().max(1.0);
    final_time / n
}

/// Manufactured scenario on level `level` of `family`, `T = 1`,
/// `tau = c h^{(k+1)/2}`.
pub fn scenario_accuracy(k: usize, family: MeshFamily, level: usize, seed: u64, c: f64) -> Result<Scenario> {
    scenario_manufactured(ProblemKind::Accuracy, k, family, level, seed, c)
}

pub fn scenario_manufactured(
    kind: ProblemKind,
    k: usize,
    family: MeshFamily,
    level: usize,
    seed: u64,
    c: f64,
) -> Result<Scenario> {
    if !(1..=6).contains(&k) {
        return Err(Error::InvalidArgument(format!("k must lie in 1..=6, got {k}")));
    }
    if kind == ProblemKind::AllenCahn {
        return Err(Error::InvalidArgument("Allen–Cahn has no exact solution".into()));
    }
    let mesh = family.mesh(level, seed)?;
    let tau = coupled_time_step(mesh.mesh_size(), k, c, 1.0);
    Ok(Scenario {
        name: match kind {
            ProblemKind::Heat => "heat".into(),
            _ => "accuracy".into(),
        },
        mesh_name: family.level_name(level),
        mesh,
        kind,
        problem: problem(kind),
        k,
        space: SpaceKind::Serendipity,
        eta: EtaStrategy::default(),
        splitting: SplittingConfig::new(Splitting::Rdr, tau, 1.0),
        output_times: vec![],
        tau_constant: Some(c),
    })
}

/// Allen–Cahn on `mesh`: `eps = 0.01`, RDR, `tau = 5e-3`, `T = 22.5`.
pub fn scenario_allen_cahn(mesh: PolygonalMesh, mesh_name: String, k: usize) -> Scenario {
    Scenario {
        name: "allen_cahn".into(),
        mesh_name,
        mesh,
        kind: ProblemKind::AllenCahn,
        problem: problem(ProblemKind::AllenCahn),
        k,
        space: SpaceKind::Serendipity,
        eta: EtaStrategy::default(),
        splitting: SplittingConfig::new(Splitting::Rdr, 5e-3, 22.5),
        output_times: ALLEN_CAHN_SNAPSHOTS.to_vec(),
        tau_constant: None,
    }
}

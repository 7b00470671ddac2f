use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::error;

use svem::fixtures::{MeshFamily, DEFAULT_SEED, LEVELS};
use svem::harness::{
    benchmark, compare, dof_report, run_convergence, run_scenario, write_dof_table, BenchConfig, BenchMode, ConvergenceStudy,
    ProblemKind, RefinementMode, Scenario, ScenarioConfig,
};
use svem::mesh::EtaStrategy;
use svem::timestep::Splitting;
use svem::{Error, Result};

#[derive(Parser)]
#[command(name = "svem", version, about = "Serendipity virtual elements for semilinear parabolic problems")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Seed of the generated meshes.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Distorted,
    Voronoi,
    Nonconvex,
}

impl From<Family> for MeshFamily {
    fn from(f: Family) -> Self {
        match f {
            Family::Distorted => MeshFamily::Distorted,
            Family::Voronoi => MeshFamily::Voronoi,
            Family::Nonconvex => MeshFamily::Nonconvex,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ScenarioName {
    Accuracy,
    Heat,
}

#[derive(Clone, Copy, ValueEnum)]
enum Variant {
    Drd,
    Rdr,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Interp,
    Coupled,
    Both,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario described by a JSON file.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
    /// Convergence study of a manufactured scenario.
    Convergence {
        #[arg(long, value_enum, default_value = "accuracy")]
        scenario: ScenarioName,
        #[arg(long, value_enum, default_value = "distorted")]
        mesh: Family,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, default_value_t = LEVELS)]
        levels: usize,
        /// Fix the finest mesh and halve the time step instead.
        #[arg(long)]
        time_mode: bool,
        #[arg(long, value_enum, default_value = "rdr")]
        variant: Variant,
    },
    /// S-VEM against enhanced-VEM DoF counts.
    Dofs {
        #[arg(long, default_value_t = 1)]
        k_min: usize,
        #[arg(long, default_value_t = 5)]
        k_max: usize,
        /// Families to tabulate (default: all), every fixture level.
        #[arg(long, value_enum)]
        mesh: Vec<Family>,
    },
    /// Phase timings of the reaction treatments.
    Bench {
        #[arg(long, value_enum, default_value = "both")]
        mode: Mode,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, value_enum, default_value = "voronoi")]
        mesh: Family,
        #[arg(long, default_value_t = 10)]
        steps: usize,
        #[arg(long, default_value_t = 3)]
        repeats: usize,
    },
}

fn write_json(path: &Path, value: &impl serde::Serialize) -> Result<()> {
    std::fs::write(path, serde_json::to_string_pretty(value)?)?;
    Ok(())
}

fn execute(cli: Cli) -> Result<()> {
    let Common { threads, seed, out } = cli.common;
    if let Some(n) = threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Internal(format!("thread pool: {e}")))?;
    }
    std::fs::create_dir_all(&out)?;
    match cli.command {
        Command::Run { config } => {
            let cfg = ScenarioConfig::from_json(&std::fs::read_to_string(&config)?)?;
            let scn = Scenario::from_config(&cfg)?;
            let summary = run_scenario(&scn, Some(&out))?;
            println!("{}", serde_json::to_string_pretty(&summary)?);
        }
        Command::Convergence {
            scenario,
            mesh,
            k,
            levels,
            time_mode,
            variant,
        } => {
            let kind = match scenario {
                ScenarioName::Accuracy => ProblemKind::Accuracy,
                ScenarioName::Heat => ProblemKind::Heat,
            };
            let mode = if time_mode { RefinementMode::Time } else { RefinementMode::Space };
            let variant = match variant {
                Variant::Drd => Splitting::Drd,
                Variant::Rdr => Splitting::Rdr,
            };
            let mut study = ConvergenceStudy::new(kind, mesh.into(), k, levels, mode).with_variant(variant);
            study.seed = seed;
            let report = run_convergence(&study)?;
            let stem = format!(
                "convergence_{}_{}_k{k}_{}_{}",
                if kind == ProblemKind::Heat { "heat" } else { "accuracy" },
                study.family,
                if time_mode { "time" } else { "space" },
                if variant == Splitting::Drd { "drd" } else { "rdr" },
            );
            report.export_csv(out.join(format!("{stem}.csv")))?;
            write_json(&out.join(format!("{stem}.json")), &report)?;
            report.write_csv(std::io::stdout())?;
            if let Some(p) = report.fitted_rate() {
                println!("least-squares rate: {p:.4}");
            }
            if let Some(c) = report.tau_constant {
                println!("tau = {c} h^((k+1)/2)");
            }
        }
        Command::Dofs { k_min, k_max, mesh } => {
            let families: Vec<MeshFamily> = if mesh.is_empty() {
                MeshFamily::ALL.to_vec()
            } else {
                mesh.into_iter().map(Into::into).collect()
            };
            let mut meshes = Vec::new();
            for f in families {
                for level in 0..LEVELS {
                    meshes.push((f.level_name(level), f.mesh(level, seed)?));
                }
            }
            let rows = dof_report(&meshes, k_min..=k_max, &EtaStrategy::default())?;
            write_dof_table(&rows, std::io::stdout())?;
            write_json(&out.join("dofs.json"), &rows)?;
        }
        Command::Bench {
            mode,
            k,
            mesh,
            steps,
            repeats,
        } => {
            let cfg = BenchConfig {
                steps,
                repeats,
                threads: threads.unwrap_or(1),
                seed,
                ..BenchConfig::new(mesh.into(), k)
            };
            match mode {
                Mode::Both => {
                    let c = compare(&cfg)?;
                    println!("{}", serde_json::to_string_pretty(&c)?);
                    write_json(&out.join("bench.json"), &c)?;
                }
                Mode::Interp | Mode::Coupled => {
                    let m = if matches!(mode, Mode::Interp) {
                        BenchMode::Interpolatory
                    } else {
                        BenchMode::Coupled
                    };
                    let r = benchmark(&cfg, m)?;
                    println!("{}", serde_json::to_string_pretty(&r)?);
                    let name = if m == BenchMode::Interpolatory { "interp" } else { "coupled" };
                    write_json(&out.join(format!("bench_{name}.json")), &r)?;
                }
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            error!("{e}");
            ExitCode::from(e.code().clamp(1, 255) as u8)
        }
    }
}

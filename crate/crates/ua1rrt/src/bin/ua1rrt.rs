//! Benchmark CLI. Exit codes: 0 success, 2 config error, 3 planning
//! failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use ua1rrt::bench::{
    self, export_trajectory, run_experiment, run_single, ExperimentConfig, PlannerId, SystemId,
};
use ua1rrt::error::Error;

#[derive(Parser)]
#[command(name = "ua1rrt", about = "Kinodynamic planning benchmarks for UA1 systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a single seeded planning query.
    Plan {
        /// System id: uav | acrobot | synthetic.
        #[arg(long)]
        system: Option<String>,
        /// Planner id: ua1rrt | knnrrt.
        #[arg(long)]
        planner: Option<String>,
        /// JSON config file; defaults apply when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output directory for stats and the trajectory CSV.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the full seeded benchmark from a config file.
    Bench {
        #[arg(long)]
        config: PathBuf,
        /// Either a comma-separated seed list ("3,17,42") or a count
        /// ("10" = seeds 0..10). Overrides the config's list.
        #[arg(long)]
        seeds: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Validate a config file without running anything.
    Check {
        #[arg(long)]
        config: PathBuf,
    },
}

const EXIT_CONFIG: u8 = 2;
const EXIT_PLANNING: u8 = 3;

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e {
                Error::Config(_) | Error::Io(_) | Error::Json(_) => EXIT_CONFIG,
                _ => EXIT_PLANNING,
            };
            ExitCode::from(code)
        }
    }
}

fn run(cli: Cli) -> ua1rrt::Result<ExitCode> {
    match cli.command {
        Command::Plan {
            system,
            planner,
            config,
            seed,
            out,
        } => {
            let mut cfg = match config {
                Some(path) => bench::load_config(&path)?,
                None => ExperimentConfig::new(SystemId::Acrobot, PlannerId::Ua1rrt),
            };
            if let Some(s) = system {
                cfg.system = SystemId::parse(&s)?;
            }
            if let Some(p) = planner {
                cfg.planner = PlannerId::parse(&p)?;
            }
            cfg.validate()?;
            let outcome = run_single(&cfg, seed)?;
            println!("{}", serde_json::to_string_pretty(&outcome.stats)?);
            if let Some(dir) = out {
                std::fs::create_dir_all(&dir)?;
                std::fs::write(
                    dir.join("stats.json"),
                    serde_json::to_string_pretty(&outcome.stats)?,
                )?;
                std::fs::write(
                    dir.join("timings.json"),
                    serde_json::to_string_pretty(&outcome.timings)?,
                )?;
                if let Some(traj) = &outcome.trajectory {
                    export_trajectory(traj, &dir.join(format!("trajectory_seed{seed}.csv")))?;
                }
            }
            if outcome.stats.success {
                Ok(ExitCode::SUCCESS)
            } else {
                eprintln!("planning failed: no trajectory within budget");
                Ok(ExitCode::from(EXIT_PLANNING))
            }
        }
        Command::Bench { config, seeds, out } => {
            let mut cfg = bench::load_config(&config)?;
            if let Some(spec) = seeds {
                cfg.seeds = parse_seeds(&spec)?;
            }
            let result = run_experiment(&cfg)?;
            result.write(&out)?;
            println!("{}", serde_json::to_string_pretty(&result.stats.summary)?);
            Ok(ExitCode::SUCCESS)
        }
        Command::Check { config } => {
            bench::load_config(&config)?;
            println!("config ok");
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn parse_seeds(spec: &str) -> ua1rrt::Result<Vec<u64>> {
    let parse_one = |s: &str| {
        s.trim()
            .parse::<u64>()
            .map_err(|_| Error::Config(format!("seeds: not an unsigned integer: {s:?}")))
    };
    if spec.contains(',') {
        spec.split(',').map(parse_one).collect()
    } else {
        let count = parse_one(spec)?;
        Ok((0..count).collect())
    }
}

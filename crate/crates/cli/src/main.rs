use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, ValueEnum};
use fedact::config::{parse_config, SchedulerName};
use fedact::experiment::run_experiment;
use fedact::report::{render_report, write_results};
use fedact::workload::WorkloadMode;

/// Simulate concurrent federated-learning jobs on a shared device fleet and
/// compare device schedulers.
#[derive(Debug, Parser)]
#[command(name = "fedact", version)]
struct Cli {
    /// TOML experiment description.
    #[arg(long)]
    config: PathBuf,

    /// fedact, random, greedy, genetic, sequential or all. Overrides the config.
    #[arg(long)]
    scheduler: Option<String>,

    /// Comma-separated seeds, e.g. `1,2,3`. Overrides the config.
    #[arg(long, value_delimiter = ',')]
    seeds: Option<Vec<u64>>,

    /// Output directory. Overrides the config.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Training workload. Overrides the config.
    #[arg(long, value_enum)]
    workload: Option<WorkloadArg>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum WorkloadArg {
    Real,
    Surrogate,
}

const EXIT_RUN_FAILED: u8 = 1;
const EXIT_BAD_CONFIG: u8 = 2;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();

    let mut cfg = match parse_config(&cli.config) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_BAD_CONFIG);
        }
    };
    if let Some(s) = &cli.scheduler {
        match SchedulerName::parse_list(s) {
            Ok(names) => cfg.scheduler.names = names,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(EXIT_BAD_CONFIG);
            }
        }
    }
    if let Some(seeds) = cli.seeds {
        if seeds.is_empty() {
            eprintln!("error: --seeds needs at least one value");
            return ExitCode::from(EXIT_BAD_CONFIG);
        }
        cfg.run.seeds = seeds;
    }
    if let Some(out) = cli.out {
        cfg.run.output = out;
    }
    if let Some(w) = cli.workload {
        cfg.scenario.workload.mode = match w {
            WorkloadArg::Real => WorkloadMode::Real,
            WorkloadArg::Surrogate => WorkloadMode::Surrogate,
        };
        if let Err(e) = cfg.scenario.workload.validate() {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_BAD_CONFIG);
        }
    }

    match run(&cfg) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_RUN_FAILED),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_RUN_FAILED)
        }
    }
}

fn run(cfg: &fedact::config::ExperimentConfig) -> anyhow::Result<bool> {
    log::info!(
        "{} devices, {} jobs, schedulers [{}], seeds {:?}",
        cfg.scenario.fleet.size(),
        cfg.scenario.jobs.len(),
        cfg.scheduler
            .names
            .iter()
            .map(|n| n.as_str())
            .collect::<Vec<_>>()
            .join(", "),
        cfg.run.seeds
    );
    let results = run_experiment(&cfg.scenario, &cfg.scheduler, &cfg.scheduler.names, &cfg.run.seeds);
    write_results(&results, &cfg.run.output)
        .with_context(|| format!("writing results to {}", cfg.run.output.display()))?;
    print!("{}", render_report(&results));
    log::info!("results written to {}", cfg.run.output.display());
    Ok(results.iter().all(|r| r.is_ok()))
}

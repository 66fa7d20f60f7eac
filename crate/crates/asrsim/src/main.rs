//! Command-line entry point.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical failure (in
//! strict mode; otherwise per-cell errors are recorded in the output).

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use serde_json::json;

use asrsim::config::{
    parse_grid_config, parse_lhs_config, parse_run_config, ConfigError,
};
use asrsim::output;
use asrsim::svg::{render_landscape_svg, SvgStyle};
use asrsim::sweep::{bistability_scan, boundary_alignment, run_grid_parallel, run_ensemble_parallel};
use asrsim_core::grid::CellOutcome;
use asrsim_core::life_history::solve_delta_mu;
use asrsim_core::sensitivity::analyze;
use asrsim_core::{build_initial_state, derive_rates, integrate, ModelParams};

#[derive(Parser)]
#[command(name = "asrsim", version, about = "Two-strategy mating-system landscape simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the life-history reparameterization at one point.
    Lifehistory {
        #[arg(long = "L")]
        longevity: f64,
        #[arg(long = "s0")]
        survival: f64,
        #[arg(long = "t1")]
        fertility_end: f64,
        #[arg(long = "t2")]
        male_retirement: f64,
        #[arg(long = "k", default_value_t = 1.0)]
        male_risk: f64,
    },
    /// Run a single simulation from a JSON config.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run an (L, t1) landscape sweep from a JSON config.
    Grid {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        workers: Option<usize>,
        /// Also render the landscape as SVG.
        #[arg(long)]
        svg: bool,
    },
    /// Run the Latin-hypercube sensitivity ensemble from a JSON config.
    Lhs {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
}

const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERIC: u8 = 3;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<ConfigError>().is_some() {
                ExitCode::from(EXIT_CONFIG)
            } else {
                ExitCode::from(EXIT_NUMERIC)
            }
        }
    }
}

/// Worker-count precedence: config value, then CLI flag, then the
/// ASRSIM_WORKERS environment variable, then all available cores.
fn resolve_workers(config: Option<usize>, flag: Option<usize>) -> usize {
    config
        .or(flag)
        .or_else(|| {
            std::env::var("ASRSIM_WORKERS")
                .ok()
                .and_then(|v| v.parse().ok())
        })
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        })
        .max(1)
}

fn read_config(path: &PathBuf) -> Result<String> {
    std::fs::read_to_string(path)
        .with_context(|| ConfigError::Invalid(format!("cannot read config {}", path.display())))
}

fn dispatch(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Lifehistory {
            longevity,
            survival,
            fertility_end,
            male_retirement,
            male_risk,
        } => {
            let params = ModelParams {
                longevity,
                juvenile_survival: survival,
                female_fertility_end: fertility_end,
                male_retirement_age: male_retirement,
                male_risk,
                ..Default::default()
            };
            let (delta, mu) = solve_delta_mu(longevity, survival)?;
            let rates = derive_rates(&params)?;
            let doc = json!({
                "provenance": output::provenance_value(&json!({
                    "L": longevity, "s0": survival, "t1": fertility_end,
                    "t2": male_retirement, "k": male_risk,
                })),
                "gamma": rates.maturation,
                "t0": rates.maturity_age,
                "delta": delta,
                "mu": mu,
                "tau": rates.female_retirement,
                "lambda": rates.male_retirement,
            });
            println!("{}", serde_json::to_string_pretty(&doc)?);
            Ok(ExitCode::SUCCESS)
        }

        Command::Run { config } => {
            let cfg = parse_run_config(&read_config(&config)?)?;
            let (params, initial, integration) = cfg.resolve()?;
            let rates = derive_rates(&params)?;
            let s0 = build_initial_state(&initial, &params);
            let traj = integrate(&s0, &params, &rates, &integration)?;
            let rep = asrsim_core::metrics::report(&traj);
            let config_echo = serde_json::to_value(&cfg)?;
            let doc = json!({
                "provenance": output::provenance_value(&config_echo),
                "classification": rep.classification.as_str(),
                "asr": rep.asr,
                "R": rep.mm_fraction,
                "P": rep.population,
                "terminal_time": rep.terminal_time,
                "terminal_state": rep.terminal_state.to_array(),
            });
            let text = serde_json::to_string_pretty(&doc)?;
            println!("{text}");
            if let Some(dir) = &cfg.output_dir {
                output::write_file(dir.as_ref(), "run_report.json", &text)?;
            }
            Ok(ExitCode::SUCCESS)
        }

        Command::Grid {
            config,
            workers,
            svg,
        } => {
            let cfg = parse_grid_config(&read_config(&config)?)?;
            let spec = cfg.resolve()?;
            let workers = resolve_workers(cfg.workers, workers);
            let dir = PathBuf::from(cfg.output_dir.clone().unwrap_or_else(|| "out".into()));
            let config_echo = serde_json::to_value(&cfg)?;

            let r0_values = cfg.r0_values.clone().unwrap_or_default();
            let grids = if r0_values.len() > 1 {
                let (grids, mask) = bistability_scan(&spec, &r0_values, workers);
                let mask_doc = serde_json::to_string_pretty(&json!({
                    "provenance": output::provenance_value(&config_echo),
                    "r0_values": r0_values,
                    "disagreement": mask,
                    "disagreeing_cells": mask.iter().filter(|&&m| m).count(),
                }))?;
                output::write_file(&dir, "disagreement.json", &mask_doc)?;
                grids
            } else {
                vec![run_grid_parallel(&spec, workers)]
            };

            let mut failed = 0usize;
            for (i, grid) in grids.iter().enumerate() {
                let suffix = if grids.len() > 1 {
                    format!("_r0_{}", i)
                } else {
                    String::new()
                };
                output::write_file(
                    &dir,
                    &format!("cells{suffix}.csv"),
                    &output::grid_csv(grid, &config_echo),
                )?;
                output::write_file(
                    &dir,
                    &format!("contours{suffix}.json"),
                    &output::contours_json(grid, &config_echo),
                )?;
                if svg {
                    let rendered = render_landscape_svg(grid, &SvgStyle::default());
                    output::write_file(&dir, &format!("landscape{suffix}.svg"), &rendered)?;
                }
                failed += grid
                    .cells
                    .iter()
                    .filter(|c| matches!(c.outcome, CellOutcome::Failed(_)))
                    .count();
            }
            if let Some(grid) = grids.first() {
                if let Some(mad) = boundary_alignment(grid) {
                    eprintln!("strategy boundary / ASR alignment (median abs diff): {mad:.4}");
                }
            }
            if cfg.strict && failed > 0 {
                eprintln!("error: {failed} cells failed in strict mode");
                return Ok(ExitCode::from(EXIT_NUMERIC));
            }
            Ok(ExitCode::SUCCESS)
        }

        Command::Lhs {
            config,
            workers,
            seed,
        } => {
            let mut cfg = parse_lhs_config(&read_config(&config)?)?;
            // CLI seed applies only when the config leaves it at default.
            if let Some(s) = seed {
                if cfg.seed == 0 {
                    cfg.seed = s;
                }
            }
            let spec = cfg.resolve()?;
            let workers = resolve_workers(cfg.workers, workers);
            let dir = PathBuf::from(cfg.output_dir.clone().unwrap_or_else(|| "out".into()));
            let config_echo = serde_json::to_value(&cfg)?;

            let records = run_ensemble_parallel(&spec, workers);
            output::write_file(&dir, "records.csv", &output::records_csv(&records, &config_echo))?;
            let report = analyze(&records)?;
            output::write_file(
                &dir,
                "sensitivity_report.json",
                &output::sensitivity_report_json(&report, &config_echo),
            )?;
            eprintln!(
                "retained {}/{} samples; headline PRCC(R~ASR | delta,mu) = {:.4}",
                report.n_retained,
                report.n_total,
                report.strategy_vs_asr_basic.coefficient
            );
            Ok(ExitCode::SUCCESS)
        }
    }
}

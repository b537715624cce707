use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use ridepool::grouping::partition_stable_groups;
use ridepool::io::bench::{run_branch_report, run_scaling_bench};
use ridepool::io::config::{InstanceConfig, SolverChoice};
use ridepool::io::generate::{bench_config, generate_clustered_instance, generate_random_instance};
use ridepool::io::ingest::ingest_instance;
use ridepool::io::pipeline::{run_pipeline, PipelineOptions};
use ridepool::io::report::{to_stable_json, MatchSummary, RunReport};
use ridepool::model::{validate_assignment, Assignment, Instance, Match};
use ridepool::oracle::brute_force_optimal;
use ridepool::vtg::build_vtg;

/// Ride-pooling assignment toolkit.
#[derive(Parser)]
#[command(version, about)]
struct Cli {
    /// TOML config file; `RIDEPOOL_<KEY>` variables and `--set` override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Config override, `key=value`. Repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Write output here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Include wall-clock times in reports.
    #[arg(long, global = true)]
    timings: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Input {
    /// Instance JSON.
    #[arg(long, conflicts_with = "trips")]
    instance: Option<PathBuf>,
    /// Trip-record CSV, ingested with the configured filters and fleet.
    #[arg(long)]
    trips: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Read trip records into an instance.
    Ingest {
        #[arg(long)]
        input: PathBuf,
    },
    /// Generate a seeded random instance.
    Gen {
        #[arg(long)]
        requests: usize,
        #[arg(long)]
        vehicles: usize,
        /// Defaults to the configured seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Generate cliques of this many requests instead of uniform demand.
        #[arg(long)]
        clustered: Option<usize>,
    },
    /// Partition requests into stable groups.
    Group(Input),
    /// Flow heuristic.
    SolveFlow {
        #[command(flatten)]
        input: Input,
        /// Also write the assignment as JSON.
        #[arg(long)]
        assignment_out: Option<PathBuf>,
    },
    /// Exact branch-and-bound.
    SolveBnb {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        assignment_out: Option<PathBuf>,
    },
    /// Both solvers plus the oracle when the instance is small enough.
    Run(Input),
    /// Exhaustive optimum of a small instance.
    Oracle(Input),
    /// Flow scaling fit and branch-and-bound node counts.
    Bench {
        /// Smaller grid.
        #[arg(long)]
        quick: bool,
    },
    /// Check an assignment or a run report against an instance.
    Validate {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        assignment: PathBuf,
    },
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run() -> Result<ExitCode> {
    let cli = Cli::parse();
    let cfg = InstanceConfig::load(cli.config.as_deref())?.with_overrides(&cli.overrides)?;
    let emit = |text: String| -> Result<()> {
        match &cli.out {
            Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    };
    let opts = PipelineOptions {
        timings: cli.timings,
        oracle: true,
    };

    match &cli.command {
        Command::Ingest { input } => {
            let (instance, report) = ingest_instance(input, &cfg)?;
            if let Some(w) = &report.warning {
                eprintln!("warning: {w}");
            }
            eprintln!(
                "rows {}, kept {}, skipped {}, filtered {}",
                report.rows,
                report.requests.len(),
                report.skipped,
                report.filtered
            );
            emit(to_stable_json(&instance))?;
        }
        Command::Gen {
            requests,
            vehicles,
            seed,
            clustered,
        } => {
            let seed = seed.unwrap_or(cfg.seed);
            let instance = match clustered {
                Some(size) => generate_clustered_instance(seed, *requests, *vehicles, *size, &cfg),
                None => generate_random_instance(seed, *requests, *vehicles, &cfg),
            };
            emit(to_stable_json(&instance))?;
        }
        Command::Group(input) => {
            let instance = load_instance(input, &cfg)?;
            let groups = partition_stable_groups(&instance.requests, &cfg.params, cfg.mode)?;
            emit(to_stable_json(&groups))?;
        }
        Command::SolveFlow { input, assignment_out } | Command::SolveBnb { input, assignment_out } => {
            let instance = load_instance(input, &cfg)?;
            let mut cfg = cfg.clone();
            let flow = matches!(cli.command, Command::SolveFlow { .. });
            cfg.solver = if flow { SolverChoice::Flow } else { SolverChoice::Bnb };
            let out = run_pipeline(&instance, &cfg, opts)?;
            if let Some(path) = assignment_out {
                let a = if flow { out.flow.as_ref() } else { out.bnb.as_ref() };
                std::fs::write(path, to_stable_json(&a.expect("solver ran")))
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            return finish(&out.report, emit);
        }
        Command::Run(input) => {
            let instance = load_instance(input, &cfg)?;
            let out = run_pipeline(&instance, &cfg, opts)?;
            return finish(&out.report, emit);
        }
        Command::Oracle(input) => {
            let instance = load_instance(input, &cfg)?;
            let vtg = build_vtg(&instance, &cfg.params);
            let mut result = brute_force_optimal(&vtg, &instance, &cfg.params)?;
            if !cli.timings {
                result.elapsed = 0.0;
            }
            emit(to_stable_json(&result))?;
        }
        Command::Bench { quick } => {
            let mut bcfg = bench_config();
            bcfg.seed = cfg.seed;
            let (requests, vehicles, repeats): (&[usize], &[usize], usize) = if *quick {
                (&[100, 1000], &[10, 100], 2)
            } else {
                (&[100, 1000, 10000], &[10, 100, 1000], 5)
            };
            let scaling = run_scaling_bench(&bcfg, requests, vehicles, repeats);
            let branching = run_branch_report(0..if *quick { 10 } else { 50 }, 8, 4)?;
            emit(to_stable_json(&serde_json::json!({
                "scaling": scaling,
                "branching": branching,
            })))?;
        }
        Command::Validate { input, assignment } => {
            let instance = load_instance(input, &cfg)?;
            let text = std::fs::read_to_string(assignment)
                .with_context(|| format!("reading {}", assignment.display()))?;
            let mut violations = Vec::new();
            for a in parse_assignments(&text, &instance, &cfg)? {
                violations.extend(validate_assignment(&a, &instance, &cfg.params, cfg.validation_options()));
            }
            emit(to_stable_json(&violations))?;
            if !violations.is_empty() {
                return Ok(ExitCode::from(2));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn finish(report: &RunReport, emit: impl Fn(String) -> Result<()>) -> Result<ExitCode> {
    emit(report.to_json())?;
    Ok(if report.violation_count() > 0 {
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    })
}

fn load_instance(input: &Input, cfg: &InstanceConfig) -> Result<Instance> {
    match (&input.instance, &input.trips) {
        (Some(path), _) => read_instance(path),
        (None, Some(path)) => {
            let (instance, report) = ingest_instance(path, cfg)?;
            if let Some(w) = report.warning {
                eprintln!("warning: {w}");
            }
            Ok(instance)
        }
        (None, None) => bail!("pass --instance or --trips"),
    }
}

fn read_instance(path: &Path) -> Result<Instance> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let raw: Instance = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    Ok(Instance::new(raw.requests, raw.vehicles)?)
}

/// An assignment as written by `--assignment-out`, or every solution in a
/// run report.
fn parse_assignments(text: &str, instance: &Instance, cfg: &InstanceConfig) -> Result<Vec<Assignment>> {
    #[derive(Deserialize)]
    struct Listed {
        matches: Vec<MatchSummary>,
    }
    #[derive(Deserialize)]
    struct Report {
        flow: Option<Listed>,
        bnb: Option<Listed>,
    }
    if let Ok(a) = serde_json::from_str::<Assignment>(text) {
        return Ok(vec![a]);
    }
    let report: Report = serde_json::from_str(text).context("expected an assignment or a run report")?;
    [report.flow, report.bnb]
        .into_iter()
        .flatten()
        .map(|listed| {
            let matches = listed
                .matches
                .into_iter()
                .map(|m| {
                    Ok(Match {
                        vehicle: m.vehicle,
                        trip: instance.trip(&m.members, &cfg.params)?,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(Assignment::from_matches(matches, instance, &cfg.params)?)
        })
        .collect()
}

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use noisy_compute::bounds::{bound_table, BoundSpec, Problem, Setting};
use noisy_compute::harness::{
    bound_for, format_sig9, parse_grid, run_trials, sweep, to_csv, AlgorithmId, ExperimentConfig,
    Family, SweepRow,
};
use noisy_compute::verify::{self, Suite, VerifyOptions};

/// Simulate OR, MAX, SEARCH and SORT over a binary symmetric channel.
#[derive(Parser, Debug)]
#[command(name = "noisy", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print one row of the query-complexity bound table as CSV.
    Bounds {
        #[arg(long)]
        problem: Problem,
        #[arg(long)]
        setting: Setting,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        delta: f64,
    },
    /// Run a batch of seeded trials and print the statistics as CSV.
    Simulate {
        #[arg(long)]
        alg: AlgorithmId,
        /// Defaults to the algorithm's natural family.
        #[arg(long)]
        family: Option<Family>,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        delta: f64,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run every configuration of a JSON grid file.
    Sweep {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run the acceptance checks and print a JSON report.
    Verify {
        /// exact_oracles, guarantees, invariants or all.
        #[arg(long, default_value = "all")]
        suite: Suite,
        /// Run only these numbered criteria instead of a suite.
        #[arg(long, value_delimiter = ',', conflicts_with = "suite")]
        criterion: Vec<u8>,
        /// Scales every confidence threshold in the checker (negative control).
        #[arg(long, default_value_t = 1.0, hide = true)]
        delta_scale: f64,
    },
}

fn natural_family(alg: AlgorithmId) -> Family {
    use AlgorithmId::*;
    match alg {
        OrTournamentFixed | OrTournamentVariable | OrNonadaptive => Family::WorstCaseOr,
        SearchAdaptive | SearchNonadaptive => Family::EachSearchSlot,
        _ => Family::RandomPermutation,
    }
}

fn print_rows(rows: &[SweepRow]) {
    print!("{}", to_csv(rows));
}

/// Failures that are the caller's fault: exit status 2.
struct Usage(anyhow::Error);

impl<E: Into<anyhow::Error>> From<E> for Usage {
    fn from(err: E) -> Self {
        Usage(err.into())
    }
}

fn run(cli: Cli) -> Result<bool, Usage> {
    match cli.command {
        Command::Bounds {
            problem,
            setting,
            k,
            p,
            delta,
        } => {
            let value = bound_table(&BoundSpec {
                problem,
                setting,
                k,
                p,
                delta,
            })?;
            println!("problem,setting,K,p,delta,lower,upper");
            println!(
                "{problem},{setting},{k},{},{},{},{}",
                format_sig9(p),
                format_sig9(delta),
                format_sig9(value.lower),
                format_sig9(value.upper)
            );
        }
        Command::Simulate {
            alg,
            family,
            k,
            p,
            delta,
            trials,
            seed,
        } => {
            let config = ExperimentConfig {
                algorithm: alg,
                family: family.unwrap_or_else(|| natural_family(alg)),
                k,
                p,
                delta,
                trials,
                seed,
            };
            let stats = run_trials(&config)?;
            let bound = bound_for(&config);
            print_rows(&[SweepRow { stats, bound }]);
        }
        Command::Sweep { config } => {
            let text = std::fs::read_to_string(&config)
                .with_context(|| format!("reading {}", config.display()))?;
            let grid =
                parse_grid(&text).with_context(|| format!("parsing {}", config.display()))?;
            print_rows(&sweep(&grid)?);
        }
        Command::Verify {
            suite,
            criterion,
            delta_scale,
        } => {
            let options = VerifyOptions { delta_scale };
            let reports = if criterion.is_empty() {
                verify::run_suite(suite, options)?
            } else {
                let mut all = Vec::new();
                for id in criterion {
                    all.extend(verify::criterion(id, options)?);
                }
                all
            };
            for r in &reports {
                eprintln!("{r}");
            }
            println!("{}", verify::to_json(&reports));
            return Ok(verify::all_pass(&reports));
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Usage(err)) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

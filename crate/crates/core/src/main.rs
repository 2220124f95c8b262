use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use bqlab::cli::{self, Format, RunOptions};
use bqlab::statevec::{set_qubit_budget, DEFAULT_QUBIT_BUDGET};
use bqlab::Error;

#[derive(Parser)]
#[command(
    name = "bqlab",
    version,
    about = "Exact simulation of bounded-query quantum oracle algorithms"
)]
struct Cli {
    /// Largest number of qubits a simulated state may use.
    #[arg(long, global = true, default_value_t = DEFAULT_QUBIT_BUDGET)]
    budget: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a property suite and report case counts and deviations.
    Verify {
        #[arg(value_parser = ["deutsch", "parallel", "chain", "bv", "mindchange", "pipeline", "superterse", "all"])]
        suite: String,
        /// Seed for the randomized parts of the suites.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run one algorithm against an oracle and its classical baseline.
    Run {
        #[arg(value_parser = cli::run::ALGORITHMS)]
        algorithm: String,
        /// Oracle spec file.
        #[arg(long)]
        spec: Option<PathBuf>,
        /// Hidden string for `bv`.
        #[arg(long)]
        a: Option<String>,
        /// Input for `extract`: a bit string for innerproduct specs,
        /// otherwise comma-separated query indices.
        #[arg(long)]
        z: Option<String>,
        /// Comma-separated query indices (default: the whole universe).
        #[arg(long)]
        queries: Option<String>,
        /// Evaluator table: one bit per row, or comma-separated n-bit outputs.
        #[arg(long)]
        evaluator: Option<String>,
        /// Output width of a random evaluator.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "text")]
        format: Format,
    },
    /// Print measured query counts for k = 1..=max-k.
    Table {
        #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u64).range(1..=4))]
        max_k: u64,
        #[arg(long, default_value = "markdown")]
        format: Format,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Exactness { .. } | Error::Garbage { .. } | Error::Adaptivity { .. } => 1,
        _ => 2,
    }
}

fn fail(e: Error) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(exit_code(&e))
}

fn main() -> ExitCode {
    let args = Cli::parse();
    set_qubit_budget(args.budget);
    match args.command {
        Command::Verify { suite, seed } => {
            let start = Instant::now();
            let results = match cli::cmd_verify(&suite, seed) {
                Ok(r) => r,
                Err(e) => return fail(e),
            };
            for r in &results {
                println!("{r}");
            }
            let cases: usize = results.iter().map(|r| r.cases).sum();
            let failed = results.iter().filter(|r| !r.passed()).count();
            println!(
                "{} suite(s), {cases} cases, {failed} failed, wall time {:.3}s",
                results.len(),
                start.elapsed().as_secs_f64()
            );
            if failed == 0 {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Command::Run {
            algorithm,
            spec,
            a,
            z,
            queries,
            evaluator,
            n,
            seed,
            format,
        } => {
            let spec = match spec.as_deref().map(cli::load_spec).transpose() {
                Ok(s) => s,
                Err(e) => return fail(e),
            };
            let opts = RunOptions {
                spec,
                a,
                z,
                queries,
                evaluator,
                n,
                seed,
            };
            match cli::cmd_run(&algorithm, &opts) {
                Ok(report) => {
                    print!("{}", cli::render(std::slice::from_ref(&report), format));
                    if format == Format::Text {
                        println!();
                    }
                    if report.exact {
                        ExitCode::SUCCESS
                    } else {
                        eprintln!("error: quantum output disagrees with the classical baseline");
                        ExitCode::from(1)
                    }
                }
                Err(e) => fail(e),
            }
        }
        Command::Table { max_k, format } => match cli::cmd_table(max_k as usize) {
            Ok(table) => {
                print!("{}", cli::render(&table.rows, format));
                for note in &table.notes {
                    eprintln!("note: {note}");
                }
                if table.rows.iter().all(|r| r.exact) {
                    ExitCode::SUCCESS
                } else {
                    ExitCode::from(1)
                }
            }
            Err(e) => fail(e),
        },
    }
}

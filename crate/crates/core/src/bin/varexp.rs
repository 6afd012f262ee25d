//! CLI for running inequality scenarios and the built-in acceptance suite.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use varexp::harness::{builtin_suite, emit, run, Format, Scenario};

#[derive(Parser)]
#[command(name = "varexp", version, about = "Variable-exponent inequality sweeps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a single scenario file.
    Run {
        /// Path to a scenario JSON document.
        scenario: PathBuf,
        #[command(flatten)]
        opts: RunOpts,
    },
    /// Run every built-in acceptance scenario.
    Suite {
        #[command(flatten)]
        opts: RunOpts,
    },
}

#[derive(clap::Args)]
struct RunOpts {
    /// Output directory for emitted reports.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Comma-separated subset of json,csv,svg.
    #[arg(long, default_value = "json", value_delimiter = ',')]
    formats: Vec<String>,
    /// Worker threads for trial evaluation (0 = all cores).
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// Force single-threaded, strictly ordered reductions.
    #[arg(long)]
    bit_reproducible: bool,
}

fn execute(scenarios: Vec<Scenario>, opts: &RunOpts) -> Result<bool, String> {
    let formats: Vec<Format> = opts
        .formats
        .iter()
        .map(|f| f.parse().map_err(|e| format!("{e}")))
        .collect::<Result<_, _>>()?;
    let threads = if opts.bit_reproducible { 1 } else { opts.threads };
    if threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| format!("thread pool: {e}"))?;
    }
    let mut all_pass = true;
    for scenario in &scenarios {
        let report = run(scenario);
        let verdict = if report.pass { "pass" } else { "FAIL" };
        println!(
            "{verdict}  {}  max_ratio {:.6e}  drift {:.3}  rows {}  errors {}",
            report.name,
            report.aggregate.max_ratio,
            report.aggregate.drift,
            report.rows.len(),
            report.errors.len()
        );
        for e in &report.errors {
            eprintln!("    error: {e}");
        }
        if let Some(w) = &report.warning {
            eprintln!("    warning: {w}");
        }
        emit(&report, &opts.out, &formats).map_err(|e| format!("emit {}: {e}", report.name))?;
        all_pass &= report.pass;
    }
    Ok(all_pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { scenario, opts } => {
            let text = match std::fs::read_to_string(&scenario) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("cannot read {}: {e}", scenario.display());
                    return ExitCode::FAILURE;
                }
            };
            match serde_json::from_str::<Scenario>(&text) {
                Ok(s) => execute(vec![s], &opts),
                Err(e) => {
                    eprintln!("invalid scenario {}: {e}", scenario.display());
                    return ExitCode::FAILURE;
                }
            }
        }
        Command::Suite { opts } => execute(builtin_suite(), &opts),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::FAILURE
        }
    }
}

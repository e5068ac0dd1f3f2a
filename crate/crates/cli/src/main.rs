//! `oldroyd`: runs, verifications and linear tables from the command line.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use oldroyd::harness::{self, parse_config, RunConfig, Variation};
use oldroyd::identities::{all_pass, run_suite};
use oldroyd::linear::{eigenvalue_csv, eigenvalue_table};
use oldroyd::model::ModelParams;
use oldroyd::Error;

#[derive(Parser)]
#[command(name = "oldroyd", version, about = "Pseudo-spectral Oldroyd-B simulator on the periodic box")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a configuration and write energies.csv and report.txt.
    Run {
        config: PathBuf,
        /// Output directory, overriding `output.dir`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the identity suite and print one JSON object per check.
    Verify {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 32)]
        n: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
    /// Print the eigenvalue table of the linearized system as CSV.
    Linear {
        #[arg(long, default_value_t = 2.0)]
        kmax: f64,
        #[arg(long, default_value_t = 1.0)]
        mu: f64,
        #[arg(long, default_value_t = 1.0)]
        mu1: f64,
        #[arg(long, default_value_t = 1.0)]
        mu2: f64,
        #[arg(long, default_value_t = 0.0)]
        a: f64,
    },
    /// Co-evolve a Hookean state and its Oldroyd-B image.
    HookeanConsistency {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run one variant per value of a single key.
    Sweep {
        config: PathBuf,
        /// `key=v1,v2,…`
        #[arg(long)]
        vary: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load(path: &Path) -> Result<RunConfig, Error> {
    parse_config(&std::fs::read_to_string(path)?)
}

fn execute(command: Command) -> Result<i32, Error> {
    match command {
        Command::Run { config, out } => {
            let cfg = load(&config)?;
            let outcome = harness::run(&cfg, out.as_deref())?;
            if let Some(e) = &outcome.abort {
                eprintln!("run aborted: {e}");
            }
            println!(
                "{} steps, output in {}, exit {}",
                outcome.steps,
                outcome.dir.display(),
                outcome.exit_code()
            );
            Ok(outcome.exit_code())
        }
        Command::Verify { seed, n, trials } => {
            let reports = run_suite(seed, n, trials)?;
            for r in &reports {
                println!("{}", serde_json::to_string(r).expect("reports serialize"));
            }
            let pass = all_pass(&reports);
            println!(
                "{}",
                serde_json::json!({ "summary": if pass { "all-pass" } else { "failed" }, "checks": reports.len(), "trials": trials, "seed": seed, "n": n })
            );
            Ok(if pass { 0 } else { harness::VERIFICATION_FAILED })
        }
        Command::Linear { kmax, mu, mu1, mu2, a } => {
            let params = ModelParams { mu, mu1, mu2, a, b: 0.0 };
            params.validate()?;
            print!("{}", eigenvalue_csv(&eigenvalue_table(kmax, &params)?));
            Ok(0)
        }
        Command::HookeanConsistency { config, out } => {
            let cfg = load(&config)?;
            let outcome = harness::hookean_consistency(&cfg, out.as_deref())?;
            println!(
                "max drift {:e}, max closure residual {:e}, output in {}",
                outcome.max_drift,
                outcome.max_closure,
                outcome.dir.display()
            );
            Ok(if outcome.passes() { 0 } else { harness::VERIFICATION_FAILED })
        }
        Command::Sweep { config, vary, out } => {
            let cfg = load(&config)?;
            let variation: Variation = vary.parse()?;
            let rows = harness::sweep(&cfg, &variation, out.as_deref())?;
            for r in &rows {
                println!("{}={}: exit {} ({})", variation.key, r.value, r.exit_code, r.status);
            }
            Ok(rows.iter().map(|r| r.exit_code).max().unwrap_or(0))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = execute(cli.command).unwrap_or_else(|e| {
        eprintln!("error: {e}");
        harness::exit_code(&e)
    });
    ExitCode::from(code as u8)
}

use std::path::PathBuf;
use std::process::ExitCode;

use chern_cli::config::parse_check_list;
use chern_cli::verify::thread_pool;
use chern_cli::{cmd_decompose, cmd_eval, cmd_verify, EvalTarget, VerifyConfig};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "chern", version, about = "Characteristic and secondary forms of Hermitian metrics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the identity checks on seeded random metrics.
    Verify {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        samples: usize,
        /// Comma-separated check names; all checks by default.
        #[arg(long)]
        checks: Option<String>,
        /// Tolerance override, e.g. `--tol bc3=1e-7`. Repeatable.
        #[arg(long = "tol", value_name = "NAME=VAL")]
        tolerances: Vec<String>,
        /// Write the JSON report here instead of standard output.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Evaluate a form for the metric in a file.
    Eval {
        #[arg(long)]
        metric: PathBuf,
        /// ch:K, bc:2, bc:3, cs:K or cocycle.
        #[arg(long)]
        target: EvalTarget,
        /// Restore the factors of sqrt(-1)/2pi.
        #[arg(long)]
        physical: bool,
    },
    /// Print the factors a and b of h = b* a b.
    Decompose {
        #[arg(long)]
        metric: PathBuf,
    },
}

fn fail(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Verify { seed, samples, checks, tolerances, json } => {
            let mut config = VerifyConfig { seed, samples, ..VerifyConfig::default() };
            if let Some(list) = checks {
                match parse_check_list(&list) {
                    Ok(c) => config.checks = c,
                    Err(e) => return fail(e),
                }
            }
            for t in &tolerances {
                if let Err(e) = config.set_tolerance(t) {
                    return fail(e);
                }
            }
            let pool = match thread_pool() {
                Ok(p) => p,
                Err(e) => return fail(e),
            };
            let (code, report) = match pool.install(|| cmd_verify(&config)) {
                Ok(r) => r,
                Err(e) => return fail(e),
            };
            for c in &report.checks {
                let worst = c.params.get("worst").and_then(|v| v.as_str()).unwrap_or("-");
                eprintln!(
                    "{} {:<11} sample {:>2}  residual {:.3e} <= {:.0e}  {worst}",
                    if c.pass { "PASS" } else { "FAIL" },
                    c.name,
                    c.params["sample"],
                    c.residual,
                    c.tolerance
                );
            }
            eprintln!("{} passed, {} failed", report.summary.passed, report.summary.failed);
            let text = report.to_json();
            match json {
                Some(path) => {
                    if let Err(e) = std::fs::write(&path, text + "\n") {
                        return fail(format!("{}: {e}", path.display()));
                    }
                }
                None => println!("{text}"),
            }
            ExitCode::from(code as u8)
        }
        Command::Eval { metric, target, physical } => match cmd_eval(&metric, target, physical) {
            Ok(out) => {
                print!("{out}");
                ExitCode::SUCCESS
            }
            Err(e) => fail(e),
        },
        Command::Decompose { metric } => match cmd_decompose(&metric) {
            Ok(out) => {
                print!("{out}");
                ExitCode::SUCCESS
            }
            Err(e) => fail(e),
        },
    }
}

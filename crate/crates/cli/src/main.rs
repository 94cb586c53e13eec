mod args;
mod commands;
mod error;
mod output;

use std::io::Write;
use std::process::ExitCode;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::Parser;
use hyperquant::Budget;

use args::{Cli, Command};
use commands::Context;
use error::{CliError, EXIT_FAIL, EXIT_PASS};
use output::{render, Outcome, Timing};

fn dispatch(command: &Command, ctx: &Context) -> Result<(&'static str, Outcome), CliError> {
    Ok(match command {
        Command::VerifyTheorem(a) => ("verify-theorem", commands::verify_theorem(a, ctx)?),
        Command::HmnTable(a) => ("hmn-table", commands::hmn_table(a, ctx)?),
        Command::Shift(a) => ("shift", commands::shift(a, ctx)?),
        Command::Search(a) => ("search", commands::search(a, ctx)?),
        Command::CheckLemmas(a) => ("check-lemmas", commands::check_lemmas(a, ctx)?),
        Command::BmsVerify(a) => ("bms-verify", commands::bms_verify(a, ctx)?),
    })
}

fn run(cli: &Cli) -> Result<u8, CliError> {
    let started = Instant::now();
    if let Some(workers) = cli.common.workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers as usize)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    let ctx = Context {
        budget: cli
            .common
            .budget
            .map(|b| Budget::uniform(u128::from(b)))
            .unwrap_or_default(),
        timing: !cli.common.no_timing,
    };
    let (name, outcome) = dispatch(&cli.command, &ctx)?;
    let timing = ctx.timing.then(|| Timing {
        generated_at: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
        runtime_ms: started.elapsed().as_millis() as u64,
    });
    let bytes = render(name, &outcome, cli.common.format, timing)?;
    match &cli.common.output {
        Some(path) => std::fs::write(path, &bytes)?,
        None => std::io::stdout().lock().write_all(&bytes)?,
    }
    match outcome.checks.first_failure() {
        None => {
            eprintln!("{name}: all {} checks passed", outcome.checks.len());
            Ok(EXIT_PASS)
        }
        Some(c) => {
            let failed = outcome.checks.failures().count();
            eprintln!(
                "{name}: {failed} of {} checks failed; first: {} (lhs {}, rhs {}, slack {:e})",
                outcome.checks.len(),
                c.name,
                c.lhs,
                c.rhs,
                c.slack
            );
            Ok(EXIT_FAIL)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

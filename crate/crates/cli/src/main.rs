use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use hetnet_cli::{parse_scenario, run, CliError, Command, RunOptions, THREADS_ENV};

#[derive(Clone, Copy, ValueEnum)]
enum Cmd {
    Rate,
    Mc,
    Compare,
    Sweep,
}

/// Downlink average rate of Poisson cellular networks.
#[derive(Parser)]
#[command(name = "hetnet-rate", version)]
struct Args {
    command: Cmd,
    /// Scenario file.
    #[arg(long)]
    scenario: PathBuf,
    /// Monte Carlo master seed, replacing the scenario's.
    #[arg(long)]
    seed: Option<u64>,
    /// Report rates in bits instead of nats.
    #[arg(long)]
    bits: bool,
    /// Output CSV path; overrides [output] path. Without either the CSV goes
    /// to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        CliError::Validation(format!(
            "{THREADS_ENV} must be a positive integer, got '{v}'"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Validation(format!("thread pool: {e}")))
}

fn execute(args: Args) -> Result<(), CliError> {
    configure_threads()?;
    let io = |path: &std::path::Path| {
        let path = path.display().to_string();
        move |source| CliError::Io { path, source }
    };
    let text = std::fs::read_to_string(&args.scenario).map_err(io(&args.scenario))?;
    let scn = parse_scenario(&text)?;
    let command = match args.command {
        Cmd::Rate => Command::Rate,
        Cmd::Mc => Command::Mc,
        Cmd::Compare => Command::Compare,
        Cmd::Sweep => Command::Sweep,
    };
    let opts = RunOptions {
        seed: args.seed,
        bits: args.bits,
    };
    let csv = run(command, &scn, &opts)?;
    match args.out.or(scn.output) {
        Some(path) => std::fs::write(&path, csv).map_err(io(&path))?,
        None => print!("{csv}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("hetnet-rate: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

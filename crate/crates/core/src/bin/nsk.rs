use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nsk_core::io::{load_sweep, parse_config, run_scenario, run_sweep, Outcome, RunError, ScenarioConfig, ScenarioKind};

/// Linear decay verification and nonlinear runs for the critical-pressure
/// Navier-Stokes-Korteweg system.
#[derive(Parser)]
#[command(name = "nsk", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compare closed-form symbols with the matrix exponential reference.
    VerifySymbols(ScenarioArgs),
    /// Fit the large-time decay exponent of a linear solution.
    LinearDecay(ScenarioArgs),
    /// Paired low-band runs with divergence-form and generic momentum.
    Ablation(ScenarioArgs),
    /// Integrate the nonlinear system and track the global weighted norm.
    NonlinearRun(ScenarioArgs),
    /// Run every scenario listed in a sweep file on a worker pool.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct Common {
    /// Output directory.
    #[arg(long, env = "NSK_OUT_DIR")]
    out: Option<PathBuf>,
    /// Worker threads (all cores by default).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct ScenarioArgs {
    /// Scenario TOML file.
    #[arg(long)]
    config: PathBuf,
    /// Overrides the seed in the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Print the normalized config and exit.
    #[arg(long)]
    dry_run: bool,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct SweepArgs {
    /// Sweep TOML file with `scenarios = ["a.toml", ...]`.
    #[arg(long)]
    config: PathBuf,
    #[command(flatten)]
    common: Common,
}

const DEFAULT_OUT: &str = "nsk-out";

fn read(path: &Path) -> Result<String, RunError> {
    std::fs::read_to_string(path).map_err(|e| RunError::io(path, e))
}

fn init_pool(threads: Option<usize>) -> Result<(), RunError> {
    if let Some(k) = threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global()
            .map_err(|e| RunError::Usage(e.to_string()))?;
    }
    Ok(())
}

fn scenario(args: ScenarioArgs, expected: ScenarioKind) -> Result<Outcome, RunError> {
    init_pool(args.common.threads)?;
    let source = read(&args.config)?;
    let mut config: ScenarioConfig = parse_config(&source)?;
    if config.kind != expected {
        return Err(RunError::Usage(format!(
            "{} holds a {} scenario, not {}",
            args.config.display(),
            config.kind.name(),
            expected.name()
        )));
    }
    if let Some(seed) = args.seed {
        config.seed = Some(seed);
        config = config.normalized()?;
    }
    if args.dry_run {
        print!("{}", config.to_toml());
        return Ok(Outcome::Pass);
    }
    let out = args
        .common
        .out
        .or_else(|| config.out_dir.clone())
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
    let outcome = run_scenario(&config, Some(&source), &out)?;
    println!("{}: {:?} ({})", config.kind.name(), outcome, out.join("report.json").display());
    Ok(outcome)
}

fn sweep(args: SweepArgs) -> Result<Outcome, RunError> {
    let entries = load_sweep(&args.config)?;
    let out = args.common.out.unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
    let mut outcome = Outcome::Pass;
    let mut error = None;
    for (name, result) in run_sweep(&entries, &out, args.common.threads)? {
        match result {
            Ok(o) => {
                println!("{name}: {o:?}");
                if o == Outcome::Fail {
                    outcome = Outcome::Fail;
                }
            }
            Err(e) => {
                eprintln!("{name}: error: {e}");
                error = Some(e);
            }
        }
    }
    match error {
        Some(e) => Err(e),
        None => Ok(outcome),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::VerifySymbols(a) => scenario(a, ScenarioKind::SymbolVerify),
        Command::LinearDecay(a) => scenario(a, ScenarioKind::LinearDecay),
        Command::Ablation(a) => scenario(a, ScenarioKind::Ablation),
        Command::NonlinearRun(a) => scenario(a, ScenarioKind::NonlinearRun),
        Command::Sweep(a) => sweep(a),
    };
    match result {
        Ok(o) => ExitCode::from(o.exit_code() as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

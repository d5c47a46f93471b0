use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use starfw::StrategyKind;
use starfw_cli::{cmd_audit, cmd_bench, cmd_check, cmd_run, BenchArgs, CheckArgs, CliError, RunArgs};

#[derive(Parser)]
#[command(name = "starfw", version, about = "Frank-Wolfe runs, checks and bound audits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a problem and write trace.csv and report.json per strategy.
    Run {
        #[arg(long)]
        spec: PathBuf,
        /// Run only this strategy instead of the spec's list.
        #[arg(long)]
        strategy: Option<StrategyKind>,
        #[arg(long, env = "STARFW_SEED")]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run every problem with every strategy and write summary.csv.
    Bench {
        #[arg(long)]
        suite: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long, env = "STARFW_SEED")]
        seed: Option<u64>,
    },
    /// Sample star-convexity, convexity, Lipschitz and gradient checks.
    Check {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, env = "STARFW_SEED")]
        seed: Option<u64>,
    },
    /// Audit a run report against the complexity bounds.
    Audit {
        #[arg(long)]
        report: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let mut stdout = std::io::stdout().lock();
    let result: Result<(), CliError> = match cli.command {
        Command::Run { spec, strategy, seed, out } => {
            cmd_run(&RunArgs { spec, strategy, seed, out }, &mut stdout)
        }
        Command::Bench { suite, out, workers, seed } => {
            cmd_bench(&BenchArgs { suite, out, workers, seed }, &mut stdout).map(|_| ())
        }
        Command::Check { spec, samples, seed } => {
            cmd_check(&CheckArgs { spec, samples, seed }, &mut stdout)
        }
        Command::Audit { report } => cmd_audit(&report, &mut stdout).map(|_| ()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

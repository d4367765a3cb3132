use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "stabilize", version, about = "Run stabilization scenarios from JSON configs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario or batch config and write reports.
    Run {
        config: PathBuf,
        /// Override the seed of every scenario.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Run a parameter sweep and write it as CSV.
    Sweep {
        config: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Check golden cases against fresh runs.
    Verify {
        golden_dir: PathBuf,
        /// Rewrite the expected reports instead of checking them.
        #[arg(long)]
        bless: bool,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("STABILIZE_LOG", "warn")).init();
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Run { config, seed, out } => stabilize_cli::cmd_run(&config, seed, &out),
        Command::Sweep { config, out } => stabilize_cli::cmd_sweep(&config, &out),
        Command::Verify { golden_dir, bless } => stabilize_cli::cmd_verify(&golden_dir, bless),
    };
    ExitCode::from(code as u8)
}

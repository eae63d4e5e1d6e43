use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use hamjump::bench::{execute, exit_code, Command};

#[derive(Parser)]
#[command(name = "hamjump", version, about = "Run benchmark configurations and write CSV results")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// One synchronous or asynchronous integration: trajectory and energy CSVs.
    Run(Args),
    /// Error over a step ladder with the fitted order.
    Converge(Args),
    /// Synchronous against asynchronous error and force evaluations.
    AsyncCompare(Args),
}

#[derive(clap::Args)]
struct Args {
    /// TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Directory for the CSV files (created if missing).
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let (command, args) = match cli.command {
        Cmd::Run(a) => (Command::Run, a),
        Cmd::Converge(a) => (Command::Converge, a),
        Cmd::AsyncCompare(a) => (Command::AsyncCompare, a),
    };
    match execute(command, &args.config, &args.out_dir) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("hamjump: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}

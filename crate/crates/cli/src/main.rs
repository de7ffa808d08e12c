use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use wavekin::{plot, run_file, CliError, RunOptions};

#[derive(Parser)]
#[command(
    name = "wavekin",
    version,
    about = "Wave-turbulence numerical laboratory"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment from a JSON config (or a run manifest).
    Run {
        config: PathBuf,
        /// Output directory; overrides the config's `output`.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Write gnuplot files for a finished run.
    EmitPlot { run_dir: PathBuf },
}

fn fail(e: CliError) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(e.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run {
            config,
            out,
            seed,
            threads,
        } => {
            let opts = RunOptions { out, seed, threads };
            match run_file(&config, &opts) {
                Ok(report) => {
                    for c in &report.outcome.checks {
                        let tag = if c.pass { "PASS" } else { "FAIL" };
                        println!("{tag} {}: {}", c.name, c.detail);
                    }
                    println!("outputs in {}", report.out_dir.display());
                    match report.verdict() {
                        Some(false) => ExitCode::from(1),
                        _ => ExitCode::SUCCESS,
                    }
                }
                Err(e) => fail(e),
            }
        }
        Command::EmitPlot { run_dir } => match plot::emit_plot(&run_dir) {
            Ok(files) => {
                for f in files {
                    println!("{}", f.display());
                }
                ExitCode::SUCCESS
            }
            Err(e) => fail(e),
        },
    }
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fracmap_cli::{parse_with_overrides, run, RunError};

#[derive(Parser)]
#[command(
    name = "fracmap",
    version,
    about = "Render escape-time fractals and their images under complex maps and flows"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Render the scene described by a JSON config.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Replace a config value, e.g. `grid.px_w=256` or `c=[0.3,0.5]`.
        #[arg(long = "override", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
        /// Cap the number of worker threads.
        #[arg(long)]
        threads: Option<usize>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let Cmd::Run {
        config,
        overrides,
        threads,
    } = cli.command;

    let text = match std::fs::read(&config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", config.display());
            return ExitCode::from(1);
        }
    };
    let cfg = match parse_with_overrides(&text, &overrides) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {}: {e}", config.display());
            return ExitCode::from(1);
        }
    };
    if let Some(n) = threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(1);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cfg) {
        Ok(summary) => {
            for img in &summary.images {
                println!("wrote {}", img.display());
            }
            println!("wrote {}", summary.sidecar.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &RunError) -> u8 {
    e.exit_code() as u8
}

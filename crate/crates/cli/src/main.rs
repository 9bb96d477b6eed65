use std::process::ExitCode;

use acp_cli::{run_experiment, Cli};
use clap::Parser;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = cli.out.clone();
    match cli.into_config().and_then(run_experiment) {
        Ok(()) => {
            println!("results written to {out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("acp: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

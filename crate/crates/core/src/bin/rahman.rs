use std::process::ExitCode;

use clap::Parser;
use rahman_core::cli::{emit, run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match run(&cli).and_then(|outcome| emit(&cli, &outcome)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}

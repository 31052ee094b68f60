use std::process::ExitCode;

use clap::Parser;
use treeheat::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok(result) => {
            for line in &result.summary {
                println!("{line}");
            }
            for f in &result.files {
                println!("wrote {}", f.display());
            }
            ExitCode::from(result.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

use std::io::{self, Write};
use std::process::ExitCode;

use clap::Parser;
use contab::cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let status = run(cli, &mut out);
    let _ = out.flush();
    match status {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("contab: {e}");
            ExitCode::FAILURE
        }
    }
}

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use pwo_cli::{run, Cli};

fn main() -> ExitCode {
    let outcome = run(Cli::parse());
    eprint!("{}", outcome.stderr);
    let mut stdout = std::io::stdout().lock();
    if let Err(e) = stdout.write_all(outcome.stdout.as_bytes()).and_then(|_| stdout.flush()) {
        eprintln!("error: cannot write output: {e}");
        return ExitCode::from(2);
    }
    ExitCode::from(outcome.code as u8)
}

//! `ap3`: exact 3AP computations from the command line.
//!
//! Exit status is 0 when every check passes, 1 for usage errors (bad flags,
//! malformed inputs, refused ranges) and 2 when a verification fails. All
//! output is assembled in memory and written once at the end.

mod args;
mod run;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use args::Cli;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = run::execute(cli.command);
    if !outcome.stdout.is_empty() {
        let mut out = std::io::stdout().lock();
        let _ = out.write_all(outcome.stdout.as_bytes());
        let _ = out.flush();
    }
    if !outcome.stderr.is_empty() {
        let _ = std::io::stderr().lock().write_all(outcome.stderr.as_bytes());
    }
    ExitCode::from(outcome.code)
}

//! Command-line front end for `cqc-core`.
//!
//! [`parse_invocation`] turns arguments into a [`CliInvocation`];
//! [`execute`] runs it and returns the process exit code
//! (0 success, 2 usage or simulation error, 3 output failure).

pub mod invocation;
pub mod report;

use std::ffi::OsString;
use std::io::{self, Write};

use thiserror::Error;

pub use invocation::{parse_invocation, CliInvocation, Command, Format};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Simulation(#[from] cqc_core::Error),
    #[error("cannot write output: {0}")]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Simulation(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

/// Runs the invocation and writes its output to the chosen sink.
pub fn try_execute(invocation: &CliInvocation) -> Result<(), CliError> {
    let output = report::render(&invocation.command, invocation.format)?;
    match &invocation.out {
        Some(path) => std::fs::write(path, output)?,
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(output.as_bytes())?;
            stdout.flush()?;
        }
    }
    Ok(())
}

pub fn execute(invocation: &CliInvocation) -> i32 {
    match try_execute(invocation) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("cqc {}: {e}", invocation.command.name());
            e.exit_code()
        }
    }
}

/// Parses and executes; `args` excludes the program name.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match parse_invocation(args) {
        Ok(invocation) => execute(&invocation),
        Err(e) => {
            let _ = e.print();
            e.exit_code()
        }
    }
}

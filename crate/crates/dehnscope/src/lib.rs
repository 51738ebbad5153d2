//! The `dehnscope` command line, callable in-process through [`invoke`].

mod args;
mod commands;
mod output;

use clap::Parser;

pub use args::{Cli, Command, Format};
pub use commands::{run, Failure, Outcome, RunConfig};

/// Captured result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Invocation {
    pub code: u8,
    pub stdout: String,
    pub stderr: String,
}

fn execute(cli: &Cli) -> Result<(String, bool), Failure> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(f) = cli.format {
        cfg.format = f;
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    let outcome = run(&cli.command, &cfg)?;
    Ok((output::render(&outcome.value, cfg.format), outcome.converged))
}

/// Runs the CLI on `args` (including the program name) without touching
/// the process's streams.
pub fn invoke<I, S>(args: I) -> Invocation
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let (stdout, stderr) = if e.use_stderr() { (String::new(), text) } else { (text, String::new()) };
            return Invocation { code, stdout, stderr };
        }
    };
    match execute(&cli) {
        Ok((stdout, true)) => Invocation { code: 0, stdout, stderr: String::new() },
        Ok((stdout, false)) => Invocation { code: 1, stdout, stderr: "dehnscope: iteration did not converge\n".into() },
        Err(Failure { code, message }) => {
            Invocation { code: code as u8, stdout: String::new(), stderr: format!("dehnscope: {message}\n") }
        }
    }
}

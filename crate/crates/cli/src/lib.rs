//! Command-line front end for `xlembed`.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.

mod args;
mod commands;
mod manifest;

use std::ffi::OsString;
use std::path::Path;

use clap::error::ErrorKind;
use clap::{CommandFactory, FromArgMatches};

pub use args::{Cli, Command, Model};
pub use manifest::Manifest;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(xlembed::Error),
}

impl From<xlembed::Error> for CliError {
    fn from(e: xlembed::Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Core(e) if e.is_numerical() => 3,
            CliError::Core(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Core(e) => write!(f, "error: {e}"),
        }
    }
}

/// Splices the `key=value` lines of every `--config FILE` into the argument
/// list right after the subcommand names, so later command-line flags
/// override them. `key=true` becomes a bare `--key`; `key=false` is dropped.
pub fn expand_config(argv: Vec<OsString>) -> Result<Vec<OsString>, CliError> {
    let mut config = None;
    for (i, a) in argv.iter().enumerate() {
        let s = a.to_string_lossy();
        if s == "--config" {
            config = argv.get(i + 1).cloned();
        } else if let Some(p) = s.strip_prefix("--config=") {
            config = Some(OsString::from(p));
        }
    }
    let Some(path) = config else {
        return Ok(argv);
    };
    let path = Path::new(&path);
    let text = std::fs::read_to_string(path).map_err(|source| {
        CliError::Core(xlembed::Error::Io {
            path: path.to_path_buf(),
            source,
        })
    })?;
    let mut injected = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("{}:{}: expected key=value", path.display(), n + 1)))?;
        let flag = format!("--{}", k.trim().replace('_', "-"));
        match v.trim() {
            "true" => injected.push(OsString::from(flag)),
            "false" => {}
            v => {
                injected.push(OsString::from(flag));
                injected.push(OsString::from(v));
            }
        }
    }
    let at = argv
        .iter()
        .skip(1)
        .position(|a| a.to_string_lossy().starts_with('-'))
        .map_or(argv.len(), |p| p + 1);
    let mut out = argv[..at].to_vec();
    out.extend(injected);
    out.extend_from_slice(&argv[at..]);
    Ok(out)
}

fn command() -> clap::Command {
    fn last_wins(c: clap::Command) -> clap::Command {
        c.args_override_self(true).mut_subcommands(last_wins)
    }
    last_wins(Cli::command())
}

/// Parses `argv` (program name first), runs the subcommand and returns the
/// process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let argv = match expand_config(argv) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("{e}");
            return e.exit_code();
        }
    };
    let mut cmd = command();
    let matches = match cmd.try_get_matches_from_mut(&argv) {
        Ok(m) => m,
        Err(e) => return usage_failure(&mut cmd, &argv, e),
    };
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(c) => c,
        Err(e) => return usage_failure(&mut cmd, &argv, e),
    };
    match commands::dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}

fn usage_failure(cmd: &mut clap::Command, argv: &[OsString], e: clap::Error) -> i32 {
    match e.kind() {
        ErrorKind::DisplayHelp | ErrorKind::DisplayVersion | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
            let _ = e.print();
            0
        }
        ErrorKind::UnknownArgument => {
            let _ = e.print();
            // list the valid flags of the subcommand that was invoked
            let mut sub = cmd.clone();
            for a in argv.iter().skip(1) {
                match sub.find_subcommand(a.to_string_lossy().as_ref()) {
                    Some(s) => sub = s.clone(),
                    None => break,
                }
            }
            eprintln!("\n{}", sub.render_help());
            1
        }
        _ => {
            let _ = e.print();
            1
        }
    }
}

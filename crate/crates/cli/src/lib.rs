//! The `skillc` command-line driver.
//!
//! Exit codes: 0 when every skill compiled, 1 for usage or configuration
//! errors, 2 when at least one skill was intercepted.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::Parser;

pub mod args;
mod batch;
mod commands;
pub mod config;
mod discover;
pub mod layout;
mod output;
mod template;

use args::{Cli, Command, Format};
use config::FileConfig;

pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 1;
pub const EXIT_INTERCEPTED: u8 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Config(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn io(path: impl AsRef<Path>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.as_ref().to_path_buf(),
            source,
        }
    }
}

fn dispatch(cli: &Cli) -> Result<u8, CliError> {
    if let Command::Init(args) = &cli.command {
        return commands::init(cli.format.unwrap_or(Format::Human), args);
    }
    let file = FileConfig::load(cli.config.as_deref())?;
    match &cli.command {
        Command::Build(a) => commands::build(&file, cli.format, a),
        Command::Check(a) => commands::check(&file, cli.format, a, "check", false),
        Command::Validate(a) => commands::check(&file, cli.format, a, "validate", true),
        Command::List(a) => commands::list(&file, cli.format, a),
        Command::Index(a) => commands::index(&file, cli.format, a),
        Command::Clean(a) => commands::clean(&file, cli.format, a),
        Command::Init(_) => unreachable!(),
    }
}

/// Parses `argv`, runs the command and returns the process exit code.
pub fn run<I, T>(argv: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match dispatch(&cli) {
        Ok(code) => code,
        Err(e) => {
            if cli.format == Some(Format::Json) {
                println!("{}", serde_json::json!({ "error": e.to_string() }));
            } else {
                eprintln!("error: {e}");
            }
            EXIT_USAGE
        }
    }
}

//! Command-line front end of the `diachrony` pipeline.
//!
//! Each subcommand reads its inputs, writes its outputs into one directory
//! and records a `manifest.json` there with the argument list, every
//! resolved setting, input digests and the base seed.
//!
//! Exit status: 0 on success, 1 for usage or input errors, 2 for internal
//! errors.

pub mod args;
pub mod commands;
pub mod context;
pub mod error;
pub mod manifest;
pub mod prepared;
pub mod settings;
pub mod svg;

use std::panic::{catch_unwind, AssertUnwindSafe};

use clap::error::ErrorKind;
use clap::Parser;

use crate::args::Cli;
use crate::context::Context;
use crate::error::Result;

fn init_logging(verbose: u8) {
    let level = match verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    let _ = env_logger::Builder::new()
        .filter_level(level)
        .parse_default_env()
        .format_timestamp(None)
        .try_init();
}

fn execute(cli: Cli, argv: Vec<String>) -> Result<()> {
    let command = cli.command;
    let ctx = Context::new(command.name(), argv, cli.global)?;
    let workers = ctx.workers()?;
    if rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build_global()
        .is_err()
    {
        log::debug!("thread pool already initialised");
    }
    commands::dispatch(&ctx, command)
}

/// Parses `argv` (program name first), runs the command and returns the
/// exit status.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<String>,
{
    let argv: Vec<String> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
        }
    };
    init_logging(cli.global.verbose);
    match catch_unwind(AssertUnwindSafe(|| execute(cli, argv))) {
        Ok(Ok(())) => 0,
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
        Err(panic) => {
            let msg = panic
                .downcast_ref::<String>()
                .map(String::as_str)
                .or_else(|| panic.downcast_ref::<&str>().copied())
                .unwrap_or("unknown panic");
            eprintln!("internal error: {msg}");
            2
        }
    }
}

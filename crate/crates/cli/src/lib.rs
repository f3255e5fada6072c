//! Command-line driver for `patcx`: spec files, `.bits` prefixes, report
//! rendering and the reproduction suite.

pub mod args;
pub mod commands;
pub mod generator;
pub mod reproduce;
pub mod table;

use clap::Parser;

pub use args::{Cli, Format};
pub use commands::{execute, Output, RunConfig};

/// Exit code for usage and spec errors.
pub const EXIT_USAGE: i32 = 1;
/// Exit code when a reproduction criterion fails.
pub const EXIT_CRITERION: i32 = 2;

/// Parse `argv`, run, print, and return the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { 0 };
        }
    };
    let cfg = match RunConfig::from_cli(cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let out = match execute(&cfg) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let rendered = out.render(cfg.format);
    match &cfg.output {
        Some(path) => {
            if let Err(e) = std::fs::write(path, rendered) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return EXIT_USAGE;
            }
        }
        None => print!("{rendered}"),
    }
    out.exit_code
}

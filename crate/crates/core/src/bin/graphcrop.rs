use std::io;

use clap::Parser;

use graphcrop::cli::{self, Cli};

fn main() {
    let args: Vec<_> = std::env::args_os().collect();
    // Peek at verbosity before dispatch so logging is configured first.
    let level = match Cli::try_parse_from(&args).map(|c| c.verbose) {
        Ok(0) | Err(_) => "warn",
        Ok(1) => "info",
        Ok(_) => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .target(env_logger::Target::Stderr)
        .init();

    let code = cli::run(args, &mut io::stdout().lock(), &mut io::stderr().lock());
    std::process::exit(code);
}

use std::process::ExitCode;

use clap::Parser;
use roundelim::cli::{run, Cli};

fn main() -> ExitCode {
    run(Cli::parse())
}

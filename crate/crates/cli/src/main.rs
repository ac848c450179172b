use std::process::ExitCode;

use clap::Parser;
use oam_cli::app::{run, Cli};

fn main() -> ExitCode {
    run(&Cli::parse())
}

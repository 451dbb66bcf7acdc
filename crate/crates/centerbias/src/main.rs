use anyhow::Context;
use clap::Parser;

use centerbias::cli::{Cli, run};

fn main() -> anyhow::Result<()> {
    let cli = Cli::parse();
    run(&cli).context("command failed")
}

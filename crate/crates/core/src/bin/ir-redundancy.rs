use clap::Parser;
use input_redundancy::cli::{run, Cli};

fn main() {
    std::process::exit(run(Cli::parse()));
}

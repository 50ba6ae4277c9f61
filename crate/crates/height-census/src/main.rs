use clap::Parser;
use height_census::cli::{main_entry, Cli};

fn main() {
    std::process::exit(main_entry(Cli::parse()));
}

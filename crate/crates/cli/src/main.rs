mod args;
mod commands;
mod gen;
mod report;

use clap::Parser;

use args::{Cli, Command};

fn main() {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Trace(a) => commands::trace(a),
        Command::Diag(a) => commands::diag(a),
        Command::Bounds(a) => commands::bounds(a),
        Command::Compare(a) => commands::compare(a),
        Command::Bench(a) => commands::bench(a),
        Command::Oracle(a) => commands::oracle(a),
        Command::Gen(a) => commands::generate(a),
    };
    if let Err(e) = result {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}

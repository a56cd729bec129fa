use clap::Parser;
use leastdiff_cli::{run, Cli};

fn main() {
    let cli = Cli::parse();
    if let Err(err) = run(cli) {
        eprintln!("leastdiff: {err}");
        std::process::exit(err.exit_code());
    }
}

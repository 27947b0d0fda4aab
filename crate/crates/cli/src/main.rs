use clap::Parser;
use superosc_cli::{execute, Cli};

fn main() {
    let cli = Cli::parse();
    match execute(&cli.command) {
        Ok(outcome) => {
            for w in outcome.document.diagnostics.warnings.iter().filter(|_| outcome.exit_code != 0) {
                eprintln!("warning: {w}");
            }
            std::process::exit(outcome.exit_code);
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}

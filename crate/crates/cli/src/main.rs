use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = rvlc_cli::Cli::parse();
    match rvlc_cli::execute(&cli) {
        Ok(summary) => {
            print!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("rvlc: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

use std::process::ExitCode;

use clap::Parser;
use freqcam::config::Cli;
use freqcam::error::CliError;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return if usage {
                ExitCode::from(CliError::CONFIG_EXIT)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match freqcam::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("freqcam: {e}");
            e.exit_code()
        }
    }
}

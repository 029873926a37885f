use std::process::ExitCode;

use clap::Parser;
use joincert_cli::args::Cli;
use joincert_cli::error::EXIT_USAGE;
use joincert_cli::{execute, write_atomic};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE as u8 } else { 0 });
        }
    };
    let code = match execute(&cli) {
        Ok(run) => {
            let written = match &run.out {
                Some(path) => write_atomic(path, &run.output),
                None => {
                    print!("{}", run.output);
                    Ok(())
                }
            };
            match written {
                Ok(()) => run.exit_code,
                Err(e) => {
                    eprintln!("joincert: {e}");
                    e.exit_code()
                }
            }
        }
        Err(e) => {
            eprintln!("joincert: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}

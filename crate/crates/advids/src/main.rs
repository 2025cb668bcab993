use std::process::ExitCode;

use advids::cli::Cli;
use advids::run::{execute, summary};
use clap::Parser;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let (command, args) = cli.command.split();
    let result = advids::cli::resolve(command, args).and_then(|m| execute(&m));
    match result {
        Ok(outcome) => {
            print!("{}", summary(&outcome));
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

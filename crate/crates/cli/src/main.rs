use std::process::ExitCode;

use ecsim_cli::{execute, parse_with_config, CliParseError, RunConfig};

fn main() -> ExitCode {
    let cli = match parse_with_config(std::env::args_os()) {
        Ok(cli) => cli,
        Err(CliParseError::Clap(e)) => {
            let code = e.exit_code();
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
        Err(CliParseError::Cli(e)) => {
            eprintln!("ecsim: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    match execute(&RunConfig::new(cli)) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("ecsim: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

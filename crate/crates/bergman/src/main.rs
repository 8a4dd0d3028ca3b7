use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use bergman::cli::{run, Cli};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // --help/--version are not errors; everything else is a usage
            // problem and shares the validation exit code.
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    ExitCode::from(u8::try_from(run(cli)).unwrap_or(1))
}

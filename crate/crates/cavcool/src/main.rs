use clap::error::ErrorKind;
use clap::Parser;

use cavcool::cli;

fn main() {
    let parsed = match cli::Cli::try_parse() {
        Ok(parsed) => parsed,
        Err(error) => {
            // clap meant --help/--version output for stdout; print and succeed.
            let code = match error.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = error.print();
            std::process::exit(code);
        }
    };
    std::process::exit(cli::execute(parsed));
}

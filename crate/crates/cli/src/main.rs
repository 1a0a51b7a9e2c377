use std::io;
use std::process::ExitCode;

use qcminer_cli::{parse_config, run, CliError};

fn main() -> ExitCode {
    let result = parse_config(std::env::args_os())
        .and_then(|s| run(&s, &mut io::stdout().lock(), &mut io::stderr().lock()));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(e)) => {
            let _ = e.print();
            ExitCode::from(if e.use_stderr() { 2 } else { 0 })
        }
        Err(e) => {
            eprintln!("qcminer: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

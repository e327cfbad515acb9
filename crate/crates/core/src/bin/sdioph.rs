use std::io::{self, Write};
use std::process::ExitCode;

fn main() -> ExitCode {
    let stdin = io::stdin();
    let mut input = stdin.lock();
    let mut stdout = io::stdout().lock();
    let mut stderr = io::stderr().lock();
    let code = sdioph::cli::run(std::env::args_os(), &mut input, &mut stdout, &mut stderr);
    let _ = stdout.flush();
    ExitCode::from(code as u8)
}

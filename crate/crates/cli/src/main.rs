use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let outcome = condim_cli::run(std::env::args_os(), &mut std::io::stdin().lock());
    let mut stdout = std::io::stdout().lock();
    // a closed pipe downstream is not worth a panic
    let _ = stdout.write_all(outcome.stdout.as_bytes());
    let _ = stdout.flush();
    ExitCode::from(outcome.exit as u8)
}

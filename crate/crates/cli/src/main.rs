use std::process::ExitCode;

fn main() -> ExitCode {
    let code = sinkchain_cli::run(std::env::args_os(), &mut std::io::stdout());
    ExitCode::from(code)
}

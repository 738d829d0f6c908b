use std::process::ExitCode;

fn main() -> ExitCode {
    mdt_service::cli::run(std::env::args_os())
}

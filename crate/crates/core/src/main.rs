use std::process::ExitCode;

fn main() -> ExitCode {
    hashpeak_core::cli::run(std::env::args_os())
}

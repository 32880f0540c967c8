use std::process::ExitCode;

fn main() -> ExitCode {
    dyadic_walsh::cli::main_with_args(std::env::args_os())
}

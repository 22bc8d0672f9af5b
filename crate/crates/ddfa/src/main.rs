use std::process::ExitCode;

fn main() -> ExitCode {
    ddfa::cli::main_from_args(std::env::args_os())
}

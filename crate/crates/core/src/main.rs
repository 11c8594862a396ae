use std::process::ExitCode;

fn main() -> ExitCode {
    shiftline::cli::main()
}

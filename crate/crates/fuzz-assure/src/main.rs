use std::process::ExitCode;

fn main() -> ExitCode {
    fuzz_assure::cli::run(std::env::args())
}

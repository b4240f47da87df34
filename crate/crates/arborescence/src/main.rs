use std::process::ExitCode;

fn main() -> ExitCode {
    arborescence::cli::run()
}

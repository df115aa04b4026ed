use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(skillc::run(std::env::args_os()))
}

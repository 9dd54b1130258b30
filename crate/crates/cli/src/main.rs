use std::process::ExitCode;

fn main() -> ExitCode {
    let result = tourney_cli::run(std::env::args_os());
    if result.exit_code == 2 {
        eprint!("{}", result.report);
    } else {
        print!("{}", result.report);
    }
    ExitCode::from(result.exit_code)
}

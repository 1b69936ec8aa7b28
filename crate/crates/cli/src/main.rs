use std::io;
use std::process::ExitCode;

use clap::Parser;
use nilrig_cli::args::Cli;
use nilrig_cli::config::OUT_DIR_ENV;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { nilrig_cli::EXIT_CONFIG } else { nilrig_cli::EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let env_dir = std::env::var_os(OUT_DIR_ENV).filter(|v| !v.is_empty()).map(Into::into);
    let code = nilrig_cli::execute(&cli, env_dir, &mut io::stdout().lock(), &mut io::stderr().lock());
    ExitCode::from(code as u8)
}

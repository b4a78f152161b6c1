use std::process::ExitCode;

use clap::Parser;
use qspace::{execute, Cli, CliError};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match execute(&cli, &mut out) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            let src = match &cli.command {
                qspace::commands::Command::Nf { expr }
                | qspace::commands::Command::D { expr, .. }
                | qspace::commands::Command::Int { expr, .. }
                | qspace::commands::Command::Translate { expr, .. }
                | qspace::commands::Command::Antipode { expr, .. } => Some(expr.as_str()),
                _ => None,
            };
            let msg = match (src, &e) {
                (Some(s), CliError::Parse { .. }) => e.annotate(s),
                _ => e.to_string(),
            };
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Parser, Subcommand};

use crate::commands::{CliError, Format};

#[derive(Debug, Parser)]
#[command(name = "bundlesec", version, about = "Decide whether surface-bundle group extensions split")]
#[command(group(ArgGroup::new("format").args(["json", "text"])))]
struct Cli {
    /// Emit a JSON report.
    #[arg(long, global = true)]
    json: bool,
    /// Emit a human-readable report (default).
    #[arg(long, global = true)]
    text: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Invariant factors of the abelianization of a presentation or spec file.
    Abelianize { file: PathBuf },
    /// Splitting obstruction for one or more bundle spec files.
    SplitCheck {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        /// Number of worker threads.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// H^1 and H^2 of the base with coefficients in the fibre module.
    Cohomology { file: PathBuf },
    /// Transgression against evaluation of the extension class.
    Transgress {
        #[arg(long, allow_hyphen_values = true, required_unless_present = "range", conflicts_with = "range")]
        k: Option<i64>,
        /// Inclusive range `a..b`.
        #[arg(long, allow_hyphen_values = true)]
        range: Option<String>,
    },
    /// The genus-3 example over the genus-3 surface and its Klein-bottle variant.
    Endo,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let format = if cli.json { Format::Json } else { Format::Text };
    let result = match cli.command {
        Command::Abelianize { file } => commands::abelianize(&file, format),
        Command::SplitCheck { files, jobs } => commands::split_check(&files, jobs, format),
        Command::Cohomology { file } => commands::cohomology(&file, format),
        Command::Transgress { k, range } => commands::transgress(k, range.as_deref(), format),
        Command::Endo => commands::endo(format),
    };
    match result {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(CliError { code, message }) => {
            eprintln!("error: {message}");
            ExitCode::from(code)
        }
    }
}

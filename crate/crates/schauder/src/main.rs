use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use schauder::presets;

#[derive(Parser)]
#[command(
    name = "schauder",
    about = "Truncated Picard iteration checks and reports"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file and write its reports.
    Run {
        file: PathBuf,
        /// Output directory (overrides SCHAUDER_OUT_DIR and the file's output.dir).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Do not print the summary.
        #[arg(long, short)]
        quiet: bool,
    },
    /// List shipped presets.
    Presets {
        #[arg(long)]
        json: bool,
    },
    /// Print the version.
    Version,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { file, out, quiet } => match schauder::run_file(&file, out.as_deref()) {
            Ok(o) => {
                if !quiet {
                    print!("{}", o.summary);
                    println!("reports in {}", o.dir.display());
                }
                ExitCode::from(o.exit_code())
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(e.exit_code())
            }
        },
        Command::Presets { json } => {
            if json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(presets::PRESETS).expect("presets serialize")
                );
            } else {
                print!("{}", presets::listing());
            }
            ExitCode::SUCCESS
        }
        Command::Version => {
            println!("schauder {}", env!("CARGO_PKG_VERSION"));
            ExitCode::SUCCESS
        }
    }
}

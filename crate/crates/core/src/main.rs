use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use log::LevelFilter;

use magnon_ep_lab::cli::{execute, parse_config, CliError, Command};

/// Spectra, phase diagrams and S21 maps of the two-cavity/two-magnon model.
#[derive(Debug, Parser)]
#[command(name = "magnon-ep-lab", version)]
struct Args {
    /// Computation to run.
    #[arg(value_enum)]
    command: Command,

    /// JSON run configuration.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Override a configuration field, e.g. `--set gamma=0.5 --set sweep.n=101`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,

    /// Output directory for the CSV and manifest.
    #[arg(long)]
    out: PathBuf,

    /// Log progress and solver choices to stderr.
    #[arg(short, long)]
    verbose: bool,
}

fn run(args: &Args) -> Result<(), CliError> {
    let (text, source) = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
                path: path.clone(),
                source,
            })?;
            (text, path.display().to_string())
        }
        None => (String::new(), "<defaults>".to_string()),
    };
    let config = parse_config(args.command, &text, &source, &args.set, args.out.clone())?;
    let summary = execute(&config, &source)?;
    log::info!("wrote {}", summary.manifest.display());
    Ok(())
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let msg = e.to_string();
            let first = msg.lines().find(|l| !l.trim().is_empty()).unwrap_or("invalid arguments");
            eprintln!("{}", first.trim());
            return ExitCode::from(2);
        }
    };
    env_logger::Builder::new()
        .filter_level(if args.verbose { LevelFilter::Debug } else { LevelFilter::Off })
        .init();
    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.diagnostic());
            ExitCode::FAILURE
        }
    }
}

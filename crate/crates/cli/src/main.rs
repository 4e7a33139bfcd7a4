use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use cvleak_cli::config::Config;
use cvleak_cli::error::{CliError, Result};
use cvleak_cli::{commands, sweep, Format};

/// Key rates, sweeps and self-checks for CV QKD with side-channel leakage.
#[derive(Parser)]
#[command(name = "cvleak", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Run configuration (TOML, or JSON with a `.json` extension).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write results here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Worker threads for sweeps.
    #[arg(long, global = true, default_value_t = 1)]
    workers: usize,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

#[derive(Subcommand)]
enum Command {
    /// Key rate at a single configuration.
    Rate,
    /// Evaluate a parameter grid.
    Sweep,
    /// Optimise V_M, V_S, the secure distance or the tolerable leakage ratio.
    Optimize,
    /// Run the closed-form vs numeric cross-checks.
    Validate,
}

fn load(path: &Option<PathBuf>) -> Result<Config> {
    let path = path.as_ref().ok_or_else(|| CliError::config("--config", "this subcommand needs --config PATH"))?;
    Config::load(path)
}

fn emit(output: &Option<PathBuf>, text: &[u8]) -> Result<()> {
    match output {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::io(p, e)),
        None => std::io::stdout().write_all(text).map_err(|e| CliError::io("stdout", e)),
    }
}

fn run(cli: &Cli) -> Result<()> {
    match cli.command {
        Command::Rate => {
            let cfg = load(&cli.config)?;
            emit(&cli.output, commands::rate(&cfg, cli.format.unwrap_or(Format::Json))?.as_bytes())
        }
        Command::Sweep => {
            let cfg = load(&cli.config)?;
            let rows = sweep::run(&cfg, cli.workers)?;
            let spec = cfg.sweep.as_ref().expect("validated");
            let mut buf = Vec::new();
            match cli.format.unwrap_or(Format::Csv) {
                Format::Csv => sweep::write_csv(&mut buf, spec, &rows).map_err(|e| CliError::io("csv", e.into()))?,
                Format::Json => {
                    buf = serde_json::to_vec_pretty(&sweep::to_json(spec, &rows)).expect("rows serialize");
                    buf.push(b'\n');
                }
            }
            emit(&cli.output, &buf)
        }
        Command::Optimize => {
            let cfg = load(&cli.config)?;
            let v = commands::optimize(&cfg)?;
            emit(&cli.output, (serde_json::to_string_pretty(&v).expect("json") + "\n").as_bytes())
        }
        Command::Validate => {
            let mut out = std::io::stdout().lock();
            commands::validate(&mut out, cli.format.unwrap_or(Format::Csv), cli.output.as_deref().map(Path::new))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("cvleak: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

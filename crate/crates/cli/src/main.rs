use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use eosvac::{run, Command, Session};

#[derive(Debug, Parser)]
#[command(name = "eosvac", version, about = "Electro-optic sampling of vacuum fluctuations")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, default_value = "out")]
    out_dir: PathBuf,
    /// Worker threads; defaults to the number of cores.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// `section.key=value`, repeatable.
    #[arg(long = "override", global = true, value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Cmd {
    /// Evaluate the base point of every geometry.
    Eval,
    /// Sweep the configured scan axis.
    Scan,
    /// Delay scan followed by a cosine transform.
    Spectrum,
    /// Dump kernel values on an (Ω, q∥) grid.
    Kernels,
    /// Run the invariant checks on the configured inputs.
    Validate,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let command = match cli.command {
        Cmd::Eval => Command::Eval,
        Cmd::Scan => Command::Scan,
        Cmd::Spectrum => Command::Spectrum,
        Cmd::Kernels => Command::Kernels,
        Cmd::Validate => Command::Validate,
    };
    let result = match &cli.config {
        Some(path) => Session::load(path, &cli.overrides),
        None => Err(eosvac::CliError::Config("--config is required".into())),
    }
    .and_then(|session| run(&session, command, &cli.out_dir, cli.threads));
    match result {
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            log::error!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use finsler_robin_cli::{
    execute, summary_text, write_outputs, Cache, Check, CliError, Command, RunConfig,
};

#[derive(Parser)]
#[command(
    name = "finsler-robin",
    version,
    about = "Robin eigenvalues of the Finsler Laplacian"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,

    /// Progress messages on stderr.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
}

#[derive(Args)]
struct Paths {
    /// JSON run configuration.
    config: PathBuf,

    /// Output directory, overriding `output.dir`.
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// First eigenvalue for each alpha on the configured domain.
    Eig(Paths),
    /// Run one verification check and write its records.
    Verify {
        which: Check,
        #[command(flatten)]
        paths: Paths,
    },
    /// Sample the annulus and Wulff eigenvalue curves over an alpha sweep.
    Curves(Paths),
    /// Perimeters, areas, radii and the parallel-set profile of the domain.
    Geom(Paths),
    /// Randomized identity suite for the configured norm.
    NormCheck(Paths),
}

fn run(cli: Cli) -> Result<u8, CliError> {
    let (command, paths) = match cli.command {
        Cmd::Eig(p) => (Command::Eig, p),
        Cmd::Verify { which, paths } => (Command::Verify(which), paths),
        Cmd::Curves(p) => (Command::Curves, p),
        Cmd::Geom(p) => (Command::Geom, p),
        Cmd::NormCheck(p) => (Command::NormCheck, p),
    };
    let text = std::fs::read_to_string(&paths.config).map_err(|source| CliError::Io {
        path: paths.config.clone(),
        source,
    })?;
    let cfg = RunConfig::parse(&text)?;
    let cache = Cache::from_env();
    let (outcome, hit) = execute(command, &cfg, cache.as_ref())?;
    if cli.verbose > 0 {
        match &cache {
            Some(c) if hit => eprintln!("cache hit in {}", c.dir().display()),
            Some(c) => eprintln!("cache miss, stored in {}", c.dir().display()),
            None => eprintln!("cache disabled"),
        }
    }
    let dir = paths.out.unwrap_or_else(|| cfg.output.dir.clone());
    write_outputs(&dir, &outcome)?;
    if cli.verbose > 0 {
        eprintln!(
            "wrote {} file(s) to {}",
            outcome.files.len() + 1,
            dir.display()
        );
    }
    print!("{}", summary_text(&outcome));
    Ok(outcome.status.exit_code())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

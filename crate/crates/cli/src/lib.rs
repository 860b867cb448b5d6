//! Command-line front end: JSON run configurations, sweeps over the boundary
//! parameter, CSV/SVG output and a content-addressed result cache.

pub mod cache;
pub mod commands;
pub mod config;
pub mod error;
pub mod svg;

use std::fs;
use std::path::Path;

pub use cache::{cache_key, Cache, CACHE_DIR_ENV};
pub use commands::{Check, Command, Outcome, Status};
pub use config::RunConfig;
pub use error::CliError;

/// Runs `command` on a worker pool sized by the config, consulting the cache
/// first. The flag reports a cache hit.
pub fn execute(
    command: Command,
    cfg: &RunConfig,
    cache: Option<&Cache>,
) -> Result<(Outcome, bool), CliError> {
    let key = cache_key(&command, cfg);
    if let Some(hit) = cache.and_then(|c| c.load(&key)) {
        return Ok((hit, true));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Config {
            field: "workers".into(),
            message: e.to_string(),
        })?;
    let outcome = pool.install(|| commands::run(command, cfg))?;
    if let Some(c) = cache {
        c.store(&key, &outcome).map_err(|source| CliError::Io {
            path: c.dir().to_path_buf(),
            source,
        })?;
    }
    Ok((outcome, false))
}

/// Writes `summary.json` and every named file of the outcome into `dir`.
pub fn write_outputs(dir: &Path, outcome: &Outcome) -> Result<(), CliError> {
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| CliError::Io { path, source }
    };
    fs::create_dir_all(dir).map_err(io(dir))?;
    let summary = dir.join("summary.json");
    fs::write(&summary, summary_text(outcome)).map_err(io(&summary))?;
    for (name, contents) in &outcome.files {
        let path = dir.join(name);
        fs::write(&path, contents).map_err(io(&path))?;
    }
    Ok(())
}

pub fn summary_text(outcome: &Outcome) -> String {
    let mut s = serde_json::to_string_pretty(&outcome.summary).expect("summary serializes");
    s.push('\n');
    s
}

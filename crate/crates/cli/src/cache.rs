//! Content-addressed result cache.

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::json;
use sha2::{Digest, Sha256};

use crate::commands::{Command, Outcome};
use crate::config::RunConfig;

pub const CACHE_DIR_ENV: &str = "FINSLER_ROBIN_CACHE_DIR";

/// Hash of everything that determines an outcome: the command, the
/// configuration minus output location and thread count, and crate versions.
pub fn cache_key(command: &Command, cfg: &RunConfig) -> String {
    let mut cfg = cfg.clone();
    cfg.output.dir = PathBuf::new();
    cfg.workers = None;
    let doc = json!({
        "command": command,
        "config": cfg,
        "versions": [env!("CARGO_PKG_VERSION"), finsler_robin::VERSION],
    });
    hex::encode(Sha256::digest(doc.to_string().as_bytes()))
}

pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    pub fn from_env() -> Option<Self> {
        std::env::var_os(CACHE_DIR_ENV)
            .filter(|v| !v.is_empty())
            .map(Self::new)
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.json"))
    }

    /// Unreadable or corrupt entries count as misses.
    pub fn load(&self, key: &str) -> Option<Outcome> {
        let text = fs::read_to_string(self.path(key)).ok()?;
        serde_json::from_str(&text).ok()
    }

    pub fn store(&self, key: &str, outcome: &Outcome) -> std::io::Result<()> {
        fs::create_dir_all(&self.dir)?;
        let tmp = self.dir.join(format!("{key}.{}.tmp", std::process::id()));
        fs::write(
            &tmp,
            serde_json::to_string(outcome).expect("outcome serializes"),
        )?;
        fs::rename(&tmp, self.path(key))
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }
}

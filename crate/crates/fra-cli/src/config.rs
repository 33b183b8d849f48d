//! Flag defaults from a `key = value` config file and the environment.
//!
//! Precedence: explicit flag > config file > `FRA_OUT_DIR` (for output
//! locations) > built-in default.

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};

#[derive(Debug, Default)]
pub struct Defaults {
    values: HashMap<String, String>,
}

impl Defaults {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let mut values = HashMap::new();
        if let Some(path) = path {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading config {}", path.display()))?;
            for (lineno, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let Some((key, value)) = line.split_once('=') else {
                    bail!("config line {} has no '=': {line:?}", lineno + 1);
                };
                values.insert(key.trim().to_string(), value.trim().to_string());
            }
        }
        Ok(Defaults { values })
    }

    fn get<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        match self.values.get(key) {
            None => Ok(None),
            Some(raw) => match raw.parse() {
                Ok(v) => Ok(Some(v)),
                Err(e) => bail!("config key {key} = {raw:?}: {e}"),
            },
        }
    }

    /// Flag value, then config value, then the built-in default.
    pub fn resolve<T: std::str::FromStr + Clone>(
        &self,
        flag: Option<T>,
        key: &str,
        default: T,
    ) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        if let Some(v) = flag {
            return Ok(v);
        }
        Ok(self.get(key)?.unwrap_or(default))
    }
}

/// Resolves a relative output path against `FRA_OUT_DIR` when that is set.
pub fn resolve_out(path: &Path) -> PathBuf {
    if path.is_absolute() {
        return path.to_path_buf();
    }
    match std::env::var_os("FRA_OUT_DIR") {
        Some(dir) if !dir.is_empty() => PathBuf::from(dir).join(path),
        _ => path.to_path_buf(),
    }
}

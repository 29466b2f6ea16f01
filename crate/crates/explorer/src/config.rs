//! Key-value config files that can stand in for command-line flags.
//!
//! Format: one `key = value` pair per line, `#` starts a comment, keys use
//! the flag spelling (`gamma-abs`, `fidelity-min`, ...). Flags given on the
//! command line always win over config entries.

use std::collections::BTreeMap;
use std::path::Path;

use crate::{ExplorerError, Result};

#[derive(Debug, Clone, Default)]
pub struct ConfigFile {
    entries: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                ExplorerError::Spec(format!(
                    "config line {} is not 'key = value': {raw:?}",
                    lineno + 1
                ))
            })?;
            entries.insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(ConfigFile { entries })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|s| s.as_str())
    }

    /// Flag value if present on the command line, else the config entry.
    pub fn merge<'a>(&'a self, flag: Option<&'a str>, key: &str) -> Option<&'a str> {
        flag.or_else(|| self.get(key))
    }
}

//! `key = value` config files. Keys are the long flag names (`-` and `_`
//! are interchangeable); flags override the file, the file overrides the
//! built-in defaults.

use std::collections::HashMap;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};

const KEYS: &[&str] = &[
    "scheme",
    "gamma",
    "eps",
    "delta",
    "eps_s",
    "z_slowdown",
    "grid",
    "eps_max",
    "delta_max",
    "competitors",
    "seeds",
    "rng_seed",
    "half_width",
];

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Config {
    values: HashMap<String, (usize, String)>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        let mut values = HashMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| Error::Parse { line, message: format!("expected 'key = value', got '{content}'") })?;
            let key = key.trim().replace('-', "_").to_ascii_lowercase();
            if !KEYS.contains(&key.as_str()) {
                return Err(Error::Parse {
                    line,
                    message: format!("unknown key '{key}' (known: {})", KEYS.join(", ")),
                });
            }
            if values.insert(key.clone(), (line, value.trim().to_string())).is_some() {
                return Err(Error::Parse { line, message: format!("duplicate key '{key}'") });
            }
        }
        Ok(Config { values })
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// The file's value for `key`, if present.
    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        debug_assert!(KEYS.contains(&key), "unregistered config key {key}");
        match self.values.get(key) {
            None => Ok(None),
            Some((line, v)) => v
                .parse()
                .map(Some)
                .map_err(|_| Error::Parse { line: *line, message: format!("bad value '{v}' for '{key}'") }),
        }
    }

    /// `flag`, else the file's value, else `default`.
    pub fn pick<T: FromStr>(&self, flag: Option<T>, key: &str, default: T) -> Result<T> {
        match flag {
            Some(v) => Ok(v),
            None => Ok(self.get(key)?.unwrap_or(default)),
        }
    }
}

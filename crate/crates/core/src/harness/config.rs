//! Flat `key = value` config files and value parsing shared by all subcommands.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use crate::error::{MooError, Result};

/// Parsed `key = value` lines. `#` starts a comment; blank lines are skipped.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigFile {
    entries: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| MooError::invalid(format!("config line {}: expected key=value", lineno + 1)))?;
            entries.insert(k.trim().replace('_', "-"), v.trim().to_string());
        }
        Ok(ConfigFile { entries })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| MooError::invalid(format!("reading config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn insert(&mut self, key: &str, value: impl Into<String>) {
        self.entries.insert(key.to_string(), value.into());
    }

    /// Flag value if given, else the config entry, else `None`.
    pub fn resolve<T: FromStr>(&self, key: &str, flag: Option<T>) -> Result<Option<T>> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.get(key) {
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| MooError::invalid(format!("config key '{key}': cannot parse '{v}'"))),
            None => Ok(None),
        }
    }

    pub fn resolve_or<T: FromStr>(&self, key: &str, flag: Option<T>, default: T) -> Result<T> {
        Ok(self.resolve(key, flag)?.unwrap_or(default))
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.entries {
            let _ = writeln!(s, "{k} = {v}");
        }
        s
    }
}

/// Comma-separated seeds; `a..b` is an inclusive range.
pub fn parse_seeds(spec: &str) -> Result<Vec<u64>> {
    let bad = || MooError::invalid(format!("bad seed list '{spec}'"));
    let mut seeds = Vec::new();
    for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        match part.split_once("..") {
            Some((a, b)) => {
                let a: u64 = a.trim().parse().map_err(|_| bad())?;
                let b: u64 = b.trim().parse().map_err(|_| bad())?;
                if b < a {
                    return Err(bad());
                }
                seeds.extend(a..=b);
            }
            None => seeds.push(part.parse().map_err(|_| bad())?),
        }
    }
    if seeds.is_empty() {
        return Err(bad());
    }
    Ok(seeds)
}

/// Comma-separated floats.
pub fn parse_floats(spec: &str) -> Result<Vec<f64>> {
    spec.split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|_| MooError::invalid(format!("bad number '{p}' in '{spec}'"))))
        .collect()
}

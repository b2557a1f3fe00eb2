use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, Result};

/// Flat `key = value` file with `#` comments. Every key must be consumed by the caller;
/// [`ConfigMap::finish`] rejects leftovers.
#[derive(Debug, Clone, Default)]
pub struct ConfigMap {
    entries: BTreeMap<String, (usize, String)>,
}

impl ConfigMap {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {line_no}: expected key = value")))?;
            let (k, v) = (k.trim(), v.trim());
            if k.is_empty() {
                return Err(Error::Config(format!("line {line_no}: empty key")));
            }
            if entries.insert(k.to_string(), (line_no, v.to_string())).is_some() {
                return Err(Error::Config(format!("line {line_no}: duplicate key '{k}'")));
            }
        }
        Ok(Self { entries })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    /// Command-line override; replaces any value from the file.
    pub fn set(&mut self, assignment: &str) -> Result<()> {
        let (k, v) = assignment
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("--set expects key=value, got '{assignment}'")))?;
        let k = k.trim();
        if k.is_empty() {
            return Err(Error::Config("--set with an empty key".into()));
        }
        self.entries.insert(k.to_string(), (0, v.trim().to_string()));
        Ok(())
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    fn take_raw(&mut self, key: &str) -> Option<(usize, String)> {
        self.entries.remove(key)
    }

    fn parse_with<T, F>(&mut self, key: &str, default: T, f: F) -> Result<T>
    where
        F: FnOnce(&str) -> Option<T>,
    {
        match self.take_raw(key) {
            None => Ok(default),
            Some((line, v)) => f(&v).ok_or_else(|| {
                Error::Config(format!("{}: invalid value '{v}' for '{key}'", loc(line)))
            }),
        }
    }

    pub fn f64(&mut self, key: &str, default: f64) -> Result<f64> {
        self.parse_with(key, default, |v| v.parse::<f64>().ok().filter(|x| !x.is_nan()))
    }

    pub fn opt_f64(&mut self, key: &str) -> Result<Option<f64>> {
        self.parse_with(key, None, |v| v.parse::<f64>().ok().filter(|x| !x.is_nan()).map(Some))
    }

    /// Comma-separated reals.
    pub fn f64_list(&mut self, key: &str, default: &[f64]) -> Result<Vec<f64>> {
        self.parse_with(key, default.to_vec(), |v| {
            v.split(',')
                .map(|x| x.trim().parse::<f64>().ok().filter(|x| !x.is_nan()))
                .collect()
        })
    }

    pub fn u32(&mut self, key: &str, default: u32) -> Result<u32> {
        self.parse_with(key, default, |v| v.parse().ok())
    }

    pub fn usize(&mut self, key: &str, default: usize) -> Result<usize> {
        self.parse_with(key, default, |v| v.parse().ok())
    }

    pub fn bool(&mut self, key: &str, default: bool) -> Result<bool> {
        self.parse_with(key, default, |v| match v {
            "true" | "1" | "yes" | "on" => Some(true),
            "false" | "0" | "no" | "off" => Some(false),
            _ => None,
        })
    }

    pub fn string(&mut self, key: &str, default: &str) -> Result<String> {
        Ok(self.take_raw(key).map_or_else(|| default.to_string(), |(_, v)| v))
    }

    /// Value restricted to one of `choices`.
    pub fn choice(&mut self, key: &str, default: &str, choices: &[&str]) -> Result<String> {
        match self.take_raw(key) {
            None => Ok(default.to_string()),
            Some((_, v)) if choices.contains(&v.as_str()) => Ok(v),
            Some((line, v)) => Err(Error::Config(format!(
                "{}: '{key}' must be one of {}, got '{v}'",
                loc(line),
                choices.join("|")
            ))),
        }
    }

    /// Fails on any key nobody asked for.
    pub fn finish(self) -> Result<()> {
        if let Some((k, (line, _))) = self.entries.into_iter().next() {
            return Err(Error::Config(format!("{}: unknown key '{k}'", loc(line))));
        }
        Ok(())
    }
}

fn loc(line: usize) -> String {
    if line == 0 {
        "--set".into()
    } else {
        format!("line {line}")
    }
}

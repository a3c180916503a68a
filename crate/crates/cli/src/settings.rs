//! Layered settings: command-line flags, then a `key = value` config file,
//! then built-in defaults.
//!
//! Config keys use the long flag names; `-` and `_` are interchangeable.
//! Lines starting with `#` are comments. List values are comma-separated.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{CliError, Result};

fn normalize_key(key: &str) -> String {
    key.trim().replace('-', "_")
}

/// Parses a flat `key = value` file.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::input(format!("config line {}: expected key = value", i + 1)))?;
        let key = normalize_key(key);
        if key.is_empty() {
            return Err(CliError::input(format!("config line {}: empty key", i + 1)));
        }
        if out.insert(key.clone(), value.trim().to_string()).is_some() {
            return Err(CliError::input(format!("config line {}: duplicate key {key:?}", i + 1)));
        }
    }
    Ok(out)
}

#[derive(Debug, Default)]
pub struct Settings {
    file: BTreeMap<String, String>,
    resolved: RefCell<BTreeMap<String, String>>,
    used: RefCell<BTreeSet<String>>,
}

impl Settings {
    pub fn new(file: BTreeMap<String, String>) -> Self {
        Self {
            file,
            ..Self::default()
        }
    }

    pub fn load(path: Option<&Path>) -> Result<Self> {
        match path {
            None => Ok(Self::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| CliError::read(p, e))?;
                Ok(Self::new(parse_config(&text)?))
            }
        }
    }

    fn file_value(&self, key: &str) -> Option<String> {
        let key = normalize_key(key);
        self.used.borrow_mut().insert(key.clone());
        self.file.get(&key).cloned()
    }

    fn record(&self, key: &str, value: String) {
        self.resolved.borrow_mut().insert(normalize_key(key), value);
    }

    fn parse<T: FromStr>(key: &str, raw: &str) -> Result<T>
    where
        T::Err: Display,
    {
        raw.trim()
            .parse()
            .map_err(|e| CliError::input(format!("config key {key}: {e}")))
    }

    pub fn optional<T: FromStr + Display>(&self, key: &str, flag: Option<T>) -> Result<Option<T>>
    where
        T::Err: Display,
    {
        let from_file = self.file_value(key);
        let value = match (flag, from_file) {
            (Some(v), _) => Some(v),
            (None, Some(raw)) => Some(Self::parse(key, &raw)?),
            (None, None) => None,
        };
        if let Some(v) = &value {
            self.record(key, v.to_string());
        }
        Ok(value)
    }

    pub fn value<T: FromStr + Display>(&self, key: &str, flag: Option<T>, default: T) -> Result<T>
    where
        T::Err: Display,
    {
        let v = self.optional(key, flag)?.unwrap_or(default);
        self.record(key, v.to_string());
        Ok(v)
    }

    pub fn required<T: FromStr + Display>(&self, key: &str, flag: Option<T>) -> Result<T>
    where
        T::Err: Display,
    {
        self.optional(key, flag)?
            .ok_or_else(|| CliError::usage(format!("missing required option --{}", key.replace('_', "-"))))
    }

    /// An empty flag list falls through to the config file.
    pub fn list<T: FromStr + Display>(&self, key: &str, flag: Vec<T>, default: Vec<T>) -> Result<Vec<T>>
    where
        T::Err: Display,
    {
        let from_file = self.file_value(key);
        let values = if !flag.is_empty() {
            flag
        } else if let Some(raw) = from_file {
            raw.split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(|s| Self::parse(key, s))
                .collect::<Result<_>>()?
        } else {
            default
        };
        let joined: Vec<String> = values.iter().map(ToString::to_string).collect();
        self.record(key, joined.join(","));
        Ok(values)
    }

    pub fn path(&self, key: &str, flag: Option<PathBuf>) -> Result<Option<PathBuf>> {
        let v = self.optional::<String>(key, flag.map(|p| p.to_string_lossy().into_owned()))?;
        Ok(v.map(PathBuf::from))
    }

    pub fn required_path(&self, key: &str, flag: Option<PathBuf>) -> Result<PathBuf> {
        self.path(key, flag)?
            .ok_or_else(|| CliError::usage(format!("missing required option --{}", key.replace('_', "-"))))
    }

    pub fn paths(&self, key: &str, flag: Vec<PathBuf>) -> Result<Vec<PathBuf>> {
        let flag: Vec<String> = flag.into_iter().map(|p| p.to_string_lossy().into_owned()).collect();
        Ok(self
            .list::<String>(key, flag, Vec::new())?
            .into_iter()
            .map(PathBuf::from)
            .collect())
    }

    /// Every value the command resolved, for the run manifest.
    pub fn snapshot(&self) -> BTreeMap<String, String> {
        self.resolved.borrow().clone()
    }

    /// Config keys that no command option read.
    pub fn unused_keys(&self) -> Vec<String> {
        let used = self.used.borrow();
        self.file.keys().filter(|k| !used.contains(*k)).cloned().collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_parsing() {
        let cfg = parse_config("# comment\n\nneighbor-k = 10\nmethod=nn\n").unwrap();
        assert_eq!(cfg.get("neighbor_k").map(String::as_str), Some("10"));
        assert_eq!(cfg.get("method").map(String::as_str), Some("nn"));
        assert!(parse_config("no equals sign").is_err());
        assert!(parse_config("a = 1\na = 2").is_err());
        assert!(parse_config(" = 1").is_err());
    }

    #[test]
    fn precedence() {
        let s = Settings::new(parse_config("dim = 50\nwindow = 3\nk = 10, 20").unwrap());
        assert_eq!(s.value("dim", Some(20usize), 100).unwrap(), 20);
        assert_eq!(s.value("window", None, 5usize).unwrap(), 3);
        assert_eq!(s.value("epochs", None, 5usize).unwrap(), 5);
        assert_eq!(s.list("k", vec![], vec![1usize]).unwrap(), vec![10, 20]);
        assert_eq!(s.list("k", vec![7usize], vec![1]).unwrap(), vec![7]);
        let snap = s.snapshot();
        assert_eq!(snap["dim"], "20");
        assert_eq!(snap["epochs"], "5");
        assert_eq!(snap["k"], "7");
    }

    #[test]
    fn bad_values_and_unused_keys() {
        let s = Settings::new(parse_config("dim = many\ntypo = 1").unwrap());
        assert!(s.value("dim", None, 100usize).is_err());
        assert_eq!(s.unused_keys(), vec!["typo".to_string()]);
        assert!(s.required::<usize>("runs", None).is_err());
    }
}

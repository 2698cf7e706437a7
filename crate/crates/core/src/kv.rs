//! Flat `key = value` text files.
//!
//! The format shared by run configs, hierarchy manifests and checkpoint
//! config snapshots: one `key = value` pair per line, `#` starts a comment,
//! blank lines are ignored. Keys are unique; duplicates are an error so a
//! typo cannot silently shadow an earlier setting.

use std::collections::BTreeMap;
use std::io::BufRead;

use crate::error::{CoreError, Result};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct KvMap {
    entries: BTreeMap<String, String>,
}

impl KvMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn parse<R: BufRead>(reader: R) -> Result<KvMap> {
        let mut entries = BTreeMap::new();
        for (idx, line) in reader.lines().enumerate() {
            let line = line?;
            let lineno = idx + 1;
            let content = match line.find('#') {
                Some(pos) => &line[..pos],
                None => &line[..],
            };
            let content = content.trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| {
                CoreError::parse(lineno, format!("expected `key = value`, got {content:?}"))
            })?;
            let key = key.trim();
            let value = value.trim();
            if key.is_empty() {
                return Err(CoreError::parse(lineno, "empty key"));
            }
            if entries.insert(key.to_string(), value.to_string()).is_some() {
                return Err(CoreError::parse(lineno, format!("duplicate key {key:?}")));
            }
        }
        Ok(KvMap { entries })
    }

    pub fn parse_str(text: &str) -> Result<KvMap> {
        Self::parse(text.as_bytes())
    }

    pub fn parse_file(path: &std::path::Path) -> Result<KvMap> {
        Self::parse(std::io::BufReader::new(std::fs::File::open(path)?))
    }

    pub fn set(&mut self, key: &str, value: impl ToString) {
        self.entries.insert(key.to_string(), value.to_string());
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|s| s.as_str())
    }

    pub fn contains(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(|s| s.as_str())
    }

    /// Required key parsed as `T`.
    pub fn require<T: std::str::FromStr>(&self, key: &str) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        let raw = self
            .get(key)
            .ok_or_else(|| CoreError::invalid(format!("missing key {key:?}")))?;
        raw.parse()
            .map_err(|e| CoreError::invalid(format!("key {key:?}: bad value {raw:?}: {e}")))
    }

    /// Optional key parsed as `T`; `default` when absent.
    pub fn get_or<T: std::str::FromStr>(&self, key: &str, default: T) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        match self.get(key) {
            None => Ok(default),
            Some(raw) => raw
                .parse()
                .map_err(|e| CoreError::invalid(format!("key {key:?}: bad value {raw:?}: {e}"))),
        }
    }

    /// Serializes keys in sorted order; parses back to an equal map.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.entries {
            out.push_str(k);
            out.push_str(" = ");
            out.push_str(v);
            out.push('\n');
        }
        out
    }
}

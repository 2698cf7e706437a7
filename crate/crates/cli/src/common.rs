//! Flag/config resolution shared by every subcommand.
//!
//! Each subcommand accepts an optional `--config` file in flat `key = value`
//! form; command-line flags take precedence over file entries, which take
//! precedence over built-in defaults. Required settings may come from either
//! source.

use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use meshgcn_core::graph::LambdaMax;
use meshgcn_core::kv::KvMap;
use meshgcn_core::{CoreError, Result};

pub fn load_config(path: Option<&Path>) -> Result<KvMap> {
    match path {
        Some(p) => KvMap::parse_file(p),
        None => Ok(KvMap::new()),
    }
}

/// Flag value if given, otherwise the parsed config entry, otherwise `None`.
pub fn resolve<T>(flag: Option<T>, kv: &KvMap, key: &str) -> Result<Option<T>>
where
    T: FromStr,
    T::Err: Display,
{
    if flag.is_some() {
        return Ok(flag);
    }
    match kv.get(key) {
        Some(raw) => raw
            .parse()
            .map(Some)
            .map_err(|e| CoreError::invalid(format!("config key {key} = {raw:?}: {e}"))),
        None => Ok(None),
    }
}

pub fn resolve_or<T>(flag: Option<T>, kv: &KvMap, key: &str, default: T) -> Result<T>
where
    T: FromStr,
    T::Err: Display,
{
    Ok(resolve(flag, kv, key)?.unwrap_or(default))
}

pub fn require<T>(flag: Option<T>, kv: &KvMap, key: &str) -> Result<T>
where
    T: FromStr,
    T::Err: Display,
{
    resolve(flag, kv, key)?.ok_or_else(|| {
        CoreError::invalid(format!("missing --{} flag (or config key {key})", key.replace('_', "-")))
    })
}

pub fn require_path(flag: Option<PathBuf>, kv: &KvMap, key: &str) -> Result<PathBuf> {
    match flag {
        Some(p) => Ok(p),
        None => match kv.get(key) {
            Some(raw) => Ok(PathBuf::from(raw)),
            None => Err(CoreError::invalid(format!(
                "missing --{} flag (or config key {key})",
                key.replace('_', "-")
            ))),
        },
    }
}

pub fn resolve_path(flag: Option<PathBuf>, kv: &KvMap, key: &str) -> Option<PathBuf> {
    flag.or_else(|| kv.get(key).map(PathBuf::from))
}

/// Comma-separated unsigned integers, e.g. `162,42`.
pub fn parse_usize_list(raw: &str) -> Result<Vec<usize>> {
    raw.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<usize>()
                .map_err(|e| CoreError::invalid(format!("bad list entry {tok:?}: {e}")))
        })
        .collect()
}

/// `power` for power iteration with the library defaults, or `fixed:<value>`.
pub fn parse_lambda(raw: &str) -> Result<LambdaMax> {
    if raw == "power" {
        return Ok(LambdaMax::default());
    }
    if let Some(v) = raw.strip_prefix("fixed:") {
        let value: f64 = v
            .trim()
            .parse()
            .map_err(|e| CoreError::invalid(format!("bad lambda value {v:?}: {e}")))?;
        return Ok(LambdaMax::Fixed(value));
    }
    Err(CoreError::invalid(format!(
        "unknown lambda strategy {raw:?}, expected power or fixed:<value>"
    )))
}

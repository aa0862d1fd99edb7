//! Flat `key = value` configuration with dotted section names.
//!
//! ```text
//! # comments run to the end of the line
//! potential.kind = poschl-teller
//! potential.nu = 1
//! targets = 0 0.4 1.3; -0.5 0.3 1.4
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{Context, Result};
use sha2::{Digest, Sha256};

/// Every key any command understands.
pub const KNOWN_KEYS: &[&str] = &[
    "potential.kind",
    "potential.nu",
    "potential.amplitude",
    "potential.width",
    "potential.support",
    "potential.taper",
    "sim.x_min",
    "sim.x_max",
    "sim.y_max",
    "sim.y_below",
    "sim.store_y_max",
    "sim.spacing",
    "sim.dt",
    "sim.t_final",
    "sim.lateral",
    "pulse.shape",
    "pulse.x",
    "pulse.y",
    "pulse.radius",
    "pulse.half_width",
    "pulse.displacement",
    "pulse.velocity",
    "targets",
    "data.dir",
    "schedule.h0",
    "schedule.ratio",
    "schedule.count",
    "reconstruct.pipeline",
    "reconstruct.epsilon",
    "noise.amplitude",
    "noise.seed",
    "kernel.h",
    "kernel.y0",
    "kernel.x0",
    "kernel.half_width",
    "kernel.nx",
    "kernel.nt",
    "kernel.tol",
    "spectrum.x_min",
    "spectrum.x_max",
    "spectrum.dx",
    "spectrum.kmax",
    "spectrum.samples",
    "spectrum.trials",
    "spectrum.seed",
    "run.workers",
];

/// A configuration value that is malformed or violates an invariant.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

pub fn invalid(msg: impl Into<String>) -> anyhow::Error {
    ConfigError(msg.into()).into()
}

#[derive(Debug, Clone, Default)]
pub struct Config {
    values: BTreeMap<String, String>,
    /// Directory that relative paths in values are resolved against.
    base: PathBuf,
}

impl Config {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        let mut config =
            Self::parse(&text).with_context(|| format!("in config {}", path.display()))?;
        config.base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(config)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                invalid(format!(
                    "line {}: expected 'key = value', got '{line}'",
                    n + 1
                ))
            })?;
            let (key, value) = (key.trim(), value.trim());
            check_key(key)?;
            if values.insert(key.to_owned(), value.to_owned()).is_some() {
                return Err(invalid(format!("line {}: duplicate key '{key}'", n + 1)));
            }
        }
        Ok(Self {
            values,
            base: PathBuf::new(),
        })
    }

    /// Sets `key` from a command-line flag, replacing any file value.
    pub fn set(&mut self, key: &str, value: impl ToString) -> Result<()> {
        check_key(key)?;
        self.values.insert(key.to_owned(), value.to_string());
        Ok(())
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        debug_assert!(KNOWN_KEYS.contains(&key), "unregistered key {key}");
        self.values.get(key).map(String::as_str)
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        self.raw(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|_| invalid(format!("{key} = '{v}' is not a valid value")))
            })
            .transpose()
    }

    pub fn get_or<T: FromStr>(&self, key: &str, default: T) -> Result<T> {
        Ok(self.get(key)?.unwrap_or(default))
    }

    pub fn path(&self, key: &str) -> Option<PathBuf> {
        self.raw(key).map(|v| self.base.join(v))
    }

    /// SHA-256 over the command and the sorted entries, as 16 hex digits.
    pub fn hash(&self, command: &str) -> String {
        let mut h = Sha256::new();
        h.update(command.as_bytes());
        for (k, v) in &self.values {
            h.update(format!("\n{k}={v}").as_bytes());
        }
        hex::encode(&h.finalize()[..8])
    }
}

fn check_key(key: &str) -> Result<()> {
    if KNOWN_KEYS.contains(&key) {
        Ok(())
    } else {
        Err(invalid(format!("unknown configuration key '{key}'")))
    }
}

/// Parses `"x0 y0 t0; x0 y0 t0; ..."` (commas also separate numbers).
pub fn parse_points(text: &str) -> Result<Vec<[f64; 3]>> {
    text.split(';')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|item| {
            let nums = item
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .map(|s| {
                    s.parse::<f64>()
                        .map_err(|_| invalid(format!("target '{item}': '{s}' is not a number")))
                })
                .collect::<Result<Vec<_>>>()?;
            match nums.as_slice() {
                [x, y, t] => Ok([*x, *y, *t]),
                _ => Err(invalid(format!(
                    "target '{item}' needs three numbers x0 y0 t0"
                ))),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_rejects_unknown_keys() {
        let c = Config::parse("# header\nkernel.h = 0.05 # trailing\n\nkernel.y0=1\n").unwrap();
        assert_eq!(c.get::<f64>("kernel.h").unwrap(), Some(0.05));
        assert_eq!(c.get_or("kernel.nx", 7usize).unwrap(), 7);
        let err = Config::parse("kernel.hh = 1").unwrap_err();
        assert!(err.to_string().contains("unknown configuration key"));
        assert!(Config::parse("kernel.h = 1\nkernel.h = 2").is_err());
        assert!(Config::parse("kernel.h").is_err());
    }

    #[test]
    fn hash_depends_on_values_and_command() {
        let mut a = Config::parse("kernel.h = 0.05").unwrap();
        let b = a.clone();
        assert_eq!(a.hash("kernel"), b.hash("kernel"));
        assert_ne!(a.hash("kernel"), a.hash("spectrum"));
        a.set("kernel.h", 0.1).unwrap();
        assert_ne!(a.hash("kernel"), b.hash("kernel"));
        assert!(a.set("bogus", 1).is_err());
    }

    #[test]
    fn target_lists() {
        let p = parse_points("0 0.4 1.3; -0.5, 0.3, 1.4;").unwrap();
        assert_eq!(p, vec![[0.0, 0.4, 1.3], [-0.5, 0.3, 1.4]]);
        assert!(parse_points("0 0.4").is_err());
        assert!(parse_points("0 a 1").is_err());
    }
}

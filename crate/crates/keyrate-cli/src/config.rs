//! Line-based `key = value` configuration files.
//!
//! Full-line `#` comments and blank lines are skipped. Values from a file
//! sit between the built-in defaults and command-line flags: flags win.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

const KNOWN_KEYS: [&str; 31] = [
    "alpha",
    "b",
    "l_r",
    "nu",
    "l",
    "protocol",
    "mu",
    "chi",
    "n",
    "eve_memory",
    "detector",
    "pump",
    "pump_start",
    "pump_end",
    "pump_step",
    "l_start",
    "l_end",
    "step",
    "out",
    "format",
    "seed",
    "rate_floor",
    "n_pulses",
    "z_limit",
    "fit_a1",
    "fit_a2",
    "fit_b0",
    "fit_b1",
    "fit_b2",
    "fit_b3",
    "fit_b4",
];
const KNOWN_FIT_KEYS: [&str; 2] = ["fit_bandwidth", "fit_pump_max"];

#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for ConfigError {}

/// Parsed config file contents.
#[derive(Debug, Default)]
pub struct FileConfig {
    values: BTreeMap<String, (usize, String)>,
}

impl FileConfig {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("reading {}: {e}", path.display())))?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn parse(text: &str, origin: &str) -> Result<Self, ConfigError> {
        let mut values = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(ConfigError(format!(
                    "{origin}:{line_no}: expected `key = value`, got `{line}`"
                )));
            };
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            if key.is_empty() || value.is_empty() {
                return Err(ConfigError(format!(
                    "{origin}:{line_no}: expected `key = value`, got `{line}`"
                )));
            }
            if !KNOWN_KEYS.contains(&key.as_str()) && !KNOWN_FIT_KEYS.contains(&key.as_str()) {
                return Err(ConfigError(format!(
                    "{origin}:{line_no}: unknown key `{key}`"
                )));
            }
            values.insert(key, (line_no, value));
        }
        Ok(Self { values })
    }

    pub fn get_str(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(|(_, v)| v.as_str())
    }

    fn parse_with<T, F>(&self, key: &str, what: &str, parse: F) -> Result<Option<T>, ConfigError>
    where
        F: FnOnce(&str) -> Option<T>,
    {
        match self.values.get(key) {
            None => Ok(None),
            Some((line, raw)) => parse(raw).map(Some).ok_or_else(|| {
                ConfigError(format!(
                    "line {line}: `{key} = {raw}` is not a valid {what}"
                ))
            }),
        }
    }

    pub fn get_f64(&self, key: &str) -> Result<Option<f64>, ConfigError> {
        self.parse_with(key, "number", |raw| raw.parse().ok())
    }

    pub fn get_u32(&self, key: &str) -> Result<Option<u32>, ConfigError> {
        self.parse_with(key, "integer", |raw| raw.parse().ok())
    }

    pub fn get_u64(&self, key: &str) -> Result<Option<u64>, ConfigError> {
        self.parse_with(key, "integer", |raw| raw.parse().ok())
    }

    pub fn get_bool(&self, key: &str) -> Result<Option<bool>, ConfigError> {
        self.parse_with(key, "boolean", |raw| match raw {
            "true" | "1" | "yes" => Some(true),
            "false" | "0" | "no" => Some(false),
            _ => None,
        })
    }
}

//! Flat key=value configuration with dotted paths, plus JSON objects
//! flattened to the same key space.

use std::collections::BTreeMap;
use std::fmt;

#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for ConfigError {}

/// Parsed configuration: dotted keys mapping to scalar strings.
#[derive(Debug, Clone, Default)]
pub struct Config {
    values: BTreeMap<String, String>,
}

impl Config {
    /// Accepts either a JSON object (first non-space byte `{`) or key=value
    /// lines with `#` comments.
    pub fn parse(text: &str) -> Result<Config, ConfigError> {
        if text.trim_start().starts_with('{') {
            Config::parse_json(text)
        } else {
            Config::parse_lines(text)
        }
    }

    fn parse_lines(text: &str) -> Result<Config, ConfigError> {
        let mut values = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| ConfigError(format!("line {}: expected key=value, got {raw:?}", idx + 1)))?;
            let key = key.trim();
            if key.is_empty() {
                return Err(ConfigError(format!("line {}: empty key", idx + 1)));
            }
            values.insert(key.to_string(), value.trim().to_string());
        }
        Ok(Config { values })
    }

    fn parse_json(text: &str) -> Result<Config, ConfigError> {
        let root: serde_json::Value = serde_json::from_str(text)
            .map_err(|e| ConfigError(format!("line {}: {e}", e.line())))?;
        let mut values = BTreeMap::new();
        flatten_json("", &root, &mut values)?;
        Ok(Config { values })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(|s| s.as_str())
    }

    pub fn require(&self, key: &str) -> Result<&str, ConfigError> {
        self.get(key).ok_or_else(|| ConfigError(format!("missing required key {key:?}")))
    }

    pub fn get_f64(&self, key: &str) -> Result<Option<f64>, ConfigError> {
        self.get(key)
            .map(|s| s.parse().map_err(|_| ConfigError(format!("key {key:?}: expected a number, got {s:?}"))))
            .transpose()
    }

    pub fn require_f64(&self, key: &str) -> Result<f64, ConfigError> {
        self.get_f64(key)?.ok_or_else(|| ConfigError(format!("missing required key {key:?}")))
    }

    pub fn get_usize(&self, key: &str) -> Result<Option<usize>, ConfigError> {
        self.get(key)
            .map(|s| s.parse().map_err(|_| ConfigError(format!("key {key:?}: expected an integer, got {s:?}"))))
            .transpose()
    }

    pub fn get_u64(&self, key: &str) -> Result<Option<u64>, ConfigError> {
        self.get(key)
            .map(|s| s.parse().map_err(|_| ConfigError(format!("key {key:?}: expected an integer, got {s:?}"))))
            .transpose()
    }

    pub fn get_bool(&self, key: &str) -> Result<Option<bool>, ConfigError> {
        self.get(key)
            .map(|s| match s {
                "true" | "1" | "yes" => Ok(true),
                "false" | "0" | "no" => Ok(false),
                other => Err(ConfigError(format!("key {key:?}: expected a bool, got {other:?}"))),
            })
            .transpose()
    }

    /// Comma-separated list of numbers.
    pub fn get_f64_list(&self, key: &str) -> Result<Option<Vec<f64>>, ConfigError> {
        match self.get(key) {
            None => Ok(None),
            Some(s) => s
                .split(',')
                .map(|t| {
                    t.trim()
                        .parse()
                        .map_err(|_| ConfigError(format!("key {key:?}: bad list entry {t:?}")))
                })
                .collect::<Result<Vec<f64>, _>>()
                .map(Some),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &String)> {
        self.values.iter()
    }
}

fn flatten_json(
    prefix: &str,
    value: &serde_json::Value,
    out: &mut BTreeMap<String, String>,
) -> Result<(), ConfigError> {
    use serde_json::Value;
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten_json(&key, v, out)?;
            }
        }
        Value::Array(items) => {
            let rendered: Vec<String> = items
                .iter()
                .map(|v| match v {
                    Value::Number(n) => Ok(n.to_string()),
                    other => Err(ConfigError(format!(
                        "key {prefix:?}: arrays may only hold numbers, got {other}"
                    ))),
                })
                .collect::<Result<_, _>>()?;
            out.insert(prefix.to_string(), rendered.join(","));
        }
        Value::String(s) => {
            out.insert(prefix.to_string(), s.clone());
        }
        Value::Number(n) => {
            out.insert(prefix.to_string(), n.to_string());
        }
        Value::Bool(b) => {
            out.insert(prefix.to_string(), b.to_string());
        }
        Value::Null => {
            return Err(ConfigError(format!("key {prefix:?}: null is not a valid value")));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_key_value_lines() {
        let cfg = Config::parse("a.b = 1\n# comment\nname=ring # trailing\n").unwrap();
        assert_eq!(cfg.get("a.b"), Some("1"));
        assert_eq!(cfg.get("name"), Some("ring"));
    }

    #[test]
    fn parses_json_with_nesting() {
        let cfg = Config::parse(r#"{"graph": {"model": "ring", "n": 16}, "vals": [1, 2.5]}"#).unwrap();
        assert_eq!(cfg.get("graph.model"), Some("ring"));
        assert_eq!(cfg.get_usize("graph.n").unwrap(), Some(16));
        assert_eq!(cfg.get_f64_list("vals").unwrap(), Some(vec![1.0, 2.5]));
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = Config::parse("ok=1\nbroken line\n").unwrap_err();
        assert!(err.0.contains("line 2"), "{err}");
        let err = Config::parse("{\n  \"a\": oops\n}").unwrap_err();
        assert!(err.0.contains("line 2"), "{err}");
    }

    #[test]
    fn missing_key_named_in_error() {
        let cfg = Config::parse("a=1\n").unwrap();
        let err = cfg.require("scenario").unwrap_err();
        assert!(err.0.contains("scenario"));
    }
}

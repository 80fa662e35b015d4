//! Flat key-value parameters from a config file and `--set` overrides.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use crate::error::{CliError, CliResult};

/// Parameters of one run. Every getter consumes its key; [`Params::finish`]
/// rejects whatever is left over.
#[derive(Clone, Debug, Default)]
pub struct Params {
    raw: BTreeMap<String, String>,
    echo: BTreeMap<String, String>,
}

fn bad(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn scalar_text(key: &str, v: &toml::Value) -> CliResult<String> {
    match v {
        toml::Value::String(s) => Ok(s.clone()),
        toml::Value::Integer(i) => Ok(i.to_string()),
        toml::Value::Float(f) => Ok(f.to_string()),
        toml::Value::Boolean(b) => Ok(b.to_string()),
        _ => Err(bad(format!("key {key}: only scalars and lists of scalars are allowed"))),
    }
}

impl Params {
    /// Reads a flat TOML file (if any) and applies `key=value` overrides.
    pub fn load(path: Option<&Path>, sets: &[String]) -> CliResult<Self> {
        let mut raw = BTreeMap::new();
        if let Some(p) = path {
            let text = std::fs::read_to_string(p).map_err(|e| bad(format!("{}: {e}", p.display())))?;
            let table: toml::Table = text.parse().map_err(|e| bad(format!("{}: {e}", p.display())))?;
            for (k, v) in &table {
                let s = match v {
                    toml::Value::Array(items) => {
                        items.iter().map(|x| scalar_text(k, x)).collect::<CliResult<Vec<_>>>()?.join(",")
                    }
                    other => scalar_text(k, other)?,
                };
                raw.insert(k.clone(), s);
            }
        }
        for s in sets {
            let (k, v) = s.split_once('=').ok_or_else(|| bad(format!("--set expects key=value, got {s}")))?;
            let k = k.trim();
            if k.is_empty() {
                return Err(bad(format!("--set with empty key: {s}")));
            }
            raw.insert(k.to_string(), v.trim().to_string());
        }
        Ok(Self { raw, echo: BTreeMap::new() })
    }

    pub fn from_pairs<I: IntoIterator<Item = (&'static str, &'static str)>>(pairs: I) -> Self {
        let raw = pairs.into_iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
        Self { raw, echo: BTreeMap::new() }
    }

    fn take_raw(&mut self, key: &str) -> Option<String> {
        self.raw.remove(key)
    }

    /// Parses `key` or falls back to `default`, recording the value used.
    pub fn get<T: FromStr + ToString>(&mut self, key: &str, default: T) -> CliResult<T> {
        let v = match self.take_raw(key) {
            Some(s) => s.parse::<T>().map_err(|_| bad(format!("key {key}: cannot parse {s:?}")))?,
            None => default,
        };
        self.echo.insert(key.to_string(), v.to_string());
        Ok(v)
    }

    /// A comma-separated list of numbers.
    pub fn list(&mut self, key: &str, default: &[f64]) -> CliResult<Vec<f64>> {
        let v = match self.take_raw(key) {
            Some(s) if s.trim().is_empty() => Vec::new(),
            Some(s) => s
                .split(',')
                .map(|t| t.trim().parse::<f64>().map_err(|_| bad(format!("key {key}: cannot parse {t:?}"))))
                .collect::<CliResult<Vec<_>>>()?,
            None => default.to_vec(),
        };
        let text: Vec<String> = v.iter().map(|x| x.to_string()).collect();
        self.echo.insert(key.to_string(), text.join(","));
        Ok(v)
    }

    /// Accepts an `experiment` key only if it names the running experiment.
    pub fn expect_experiment(&mut self, name: &str) -> CliResult<()> {
        if let Some(e) = self.take_raw("experiment") {
            if e != name {
                return Err(bad(format!("config is for experiment {e}, not {name}")));
            }
        }
        self.echo.insert("experiment".into(), name.into());
        Ok(())
    }

    /// Fails on any key no getter asked for.
    pub fn finish(&self) -> CliResult<()> {
        if self.raw.is_empty() {
            Ok(())
        } else {
            let keys: Vec<&str> = self.raw.keys().map(|s| s.as_str()).collect();
            Err(bad(format!("unknown keys: {}", keys.join(", "))))
        }
    }

    pub fn echo(&self) -> &BTreeMap<String, String> {
        &self.echo
    }
}

/// Checks a condition on a parsed parameter.
pub fn require(ok: bool, msg: &str) -> CliResult<()> {
    if ok {
        Ok(())
    } else {
        Err(bad(msg))
    }
}

//! Flat key-value configuration.
//!
//! Two encodings are accepted: `key = value` lines (TOML syntax, `#`
//! comments) or a single JSON object. Recognised model keys are `alpha`,
//! `beta`, `mu`, `nu`, `theta` and, for closed-loop scenarios, `beta_ex`.
//! Other keys are kept as-is and can be read with [`Config::get_f64`] or
//! [`Config::get_str`].

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::mobile::MobileInputs;
use crate::model::ModelParams;

#[derive(Debug, Clone, PartialEq)]
pub enum ConfigValue {
    Number(f64),
    Text(String),
    List(Vec<f64>),
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Config {
    entries: BTreeMap<String, ConfigValue>,
}

impl Config {
    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        if text.trim_start().starts_with('{') {
            Self::parse_json(text)
        } else {
            Self::parse_key_value(text)
        }
    }

    fn parse_json(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        let object = value
            .as_object()
            .ok_or_else(|| Error::Config("JSON configuration must be an object".into()))?;
        let mut entries = BTreeMap::new();
        for (key, value) in object {
            let parsed = match value {
                serde_json::Value::Number(x) => ConfigValue::Number(x.as_f64().unwrap_or(f64::NAN)),
                serde_json::Value::String(s) => ConfigValue::Text(s.clone()),
                serde_json::Value::Array(items) => ConfigValue::List(
                    items
                        .iter()
                        .map(|v| {
                            v.as_f64().ok_or_else(|| {
                                Error::Config(format!("`{key}`: non-numeric list item"))
                            })
                        })
                        .collect::<Result<_>>()?,
                ),
                other => return Err(Error::Config(format!("`{key}`: unsupported value {other}"))),
            };
            entries.insert(key.clone(), parsed);
        }
        Ok(Config { entries })
    }

    fn parse_key_value(text: &str) -> Result<Self> {
        let table: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        let mut entries = BTreeMap::new();
        for (key, value) in table {
            let parsed = match value {
                toml::Value::Integer(i) => ConfigValue::Number(i as f64),
                toml::Value::Float(x) => ConfigValue::Number(x),
                toml::Value::String(s) => ConfigValue::Text(s),
                toml::Value::Array(items) => ConfigValue::List(
                    items
                        .iter()
                        .map(|v| match v {
                            toml::Value::Integer(i) => Ok(*i as f64),
                            toml::Value::Float(x) => Ok(*x),
                            _ => Err(Error::Config(format!("`{key}`: non-numeric list item"))),
                        })
                        .collect::<Result<_>>()?,
                ),
                _ => {
                    return Err(Error::Config(format!(
                        "`{key}`: nested tables are not supported"
                    )))
                }
            };
            entries.insert(key, parsed);
        }
        Ok(Config { entries })
    }

    pub fn set(&mut self, key: impl Into<String>, value: f64) {
        self.entries.insert(key.into(), ConfigValue::Number(value));
    }

    pub fn get(&self, key: &str) -> Option<&ConfigValue> {
        self.entries.get(key)
    }

    pub fn get_f64(&self, key: &str) -> Result<Option<f64>> {
        match self.entries.get(key) {
            None => Ok(None),
            Some(ConfigValue::Number(x)) => Ok(Some(*x)),
            Some(ConfigValue::Text(s)) => s
                .trim()
                .parse()
                .map(Some)
                .map_err(|_| Error::Config(format!("`{key}` is not a number: {s}"))),
            Some(ConfigValue::List(_)) => Err(Error::Config(format!(
                "`{key}` is a list, expected a number"
            ))),
        }
    }

    pub fn get_str(&self, key: &str) -> Option<&str> {
        match self.entries.get(key) {
            Some(ConfigValue::Text(s)) => Some(s),
            _ => None,
        }
    }

    pub fn get_list(&self, key: &str) -> Result<Option<Vec<f64>>> {
        match self.entries.get(key) {
            None => Ok(None),
            Some(ConfigValue::List(v)) => Ok(Some(v.clone())),
            Some(ConfigValue::Number(x)) => Ok(Some(vec![*x])),
            Some(ConfigValue::Text(s)) => parse_list(s).map(Some),
        }
    }

    fn require(&self, key: &'static str) -> Result<f64> {
        self.get_f64(key)?
            .ok_or_else(|| Error::Config(format!("missing key `{key}`")))
    }

    pub fn model_params(&self) -> Result<ModelParams> {
        ModelParams::new(
            self.require("alpha")?,
            self.require("beta")?,
            self.require("mu")?,
            self.require("nu")?,
            self.require("theta")?,
        )
    }

    pub fn mobile_inputs(&self) -> Result<MobileInputs> {
        MobileInputs::new(
            self.require("alpha")?,
            self.require("beta_ex")?,
            self.require("mu")?,
            self.require("nu")?,
            self.require("theta")?,
        )
    }
}

/// Comma-separated list of reals, e.g. `0.9,0.95,0.99`.
pub fn parse_list(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse()
                .map_err(|_| Error::Config(format!("not a number: {s}")))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn key_value_file() {
        let cfg = Config::parse(
            "# rates\nalpha = 1\nbeta = 5.0\nmu = 2\nnu = 1\ntheta = 1\nlabel = \"x\"\n",
        )
        .unwrap();
        let p = cfg.model_params().unwrap();
        assert_eq!(p.beta(), 5.0);
        assert_eq!(cfg.get_str("label"), Some("x"));
    }

    #[test]
    fn json_file() {
        let cfg = Config::parse(
            r#"{"alpha":0.4,"beta_ex":0.3,"mu":1,"nu":1,"theta":1,"rho_tot":[0.9,0.95]}"#,
        )
        .unwrap();
        let m = cfg.mobile_inputs().unwrap();
        assert!((m.rho_tot() - 0.7).abs() < 1e-12);
        assert_eq!(cfg.get_list("rho_tot").unwrap().unwrap(), vec![0.9, 0.95]);
    }

    #[test]
    fn missing_key_is_reported() {
        let cfg = Config::parse("alpha = 1\n").unwrap();
        let err = cfg.model_params().unwrap_err();
        assert!(err.to_string().contains("beta"));
    }

    #[test]
    fn comma_lists() {
        assert_eq!(parse_list("0.9, 0.95,0.99").unwrap(), vec![0.9, 0.95, 0.99]);
        assert!(parse_list("0.9,x").is_err());
    }
}

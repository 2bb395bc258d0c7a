//! Experiment configuration: a name, a flat parameter map, the seed, the
//! dimension cap, and the loop-scaling factor. Config files are flat
//! `key = value` lines; command-line flags override file entries.

use std::collections::BTreeMap;

use owsg_wb_core::{Error, Result, DEFAULT_DIM_CAP};

pub const SEED_ENV: &str = "OWSG_WB_SEED";
pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub name: String,
    pub params: BTreeMap<String, String>,
    pub seed: u64,
    pub dim_cap: usize,
    pub scale_loops: f64,
    /// When false, report rows print `-` for wall time so reruns are
    /// byte-identical.
    pub timing: bool,
}

impl ExperimentConfig {
    pub fn new(name: &str, seed: u64) -> Self {
        ExperimentConfig {
            name: name.to_string(),
            params: BTreeMap::new(),
            seed,
            dim_cap: DEFAULT_DIM_CAP,
            scale_loops: 1.0,
            timing: true,
        }
    }

    pub fn with_param(mut self, key: &str, value: impl ToString) -> Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }

    pub fn param_u64(&self, key: &str, default: u64) -> Result<u64> {
        match self.params.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("{key} = {v} is not an integer"))),
        }
    }

    pub fn param_usize(&self, key: &str, default: usize) -> Result<usize> {
        Ok(self.param_u64(key, default as u64)? as usize)
    }

    pub fn param_f64(&self, key: &str, default: f64) -> Result<f64> {
        match self.params.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("{key} = {v} is not a number"))),
        }
    }

    pub fn param_str(&self, key: &str, default: &str) -> String {
        self.params
            .get(key)
            .cloned()
            .unwrap_or_else(|| default.to_string())
    }

    /// Parameter pairs every report row of this experiment carries.
    pub fn stamp(&self) -> Vec<(String, String)> {
        let mut out = vec![("seed".to_string(), self.seed.to_string())];
        for (k, v) in &self.params {
            out.push((k.clone(), v.clone()));
        }
        if (self.scale_loops - 1.0).abs() > 1e-12 {
            out.push(("scale_loops".to_string(), self.scale_loops.to_string()));
        }
        out
    }
}

/// Parses a flat `key = value` config file body. Blank lines and lines
/// starting with `#` are ignored.
pub fn parse_config_lines(body: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (lineno, line) in body.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::ParseError(format!(
                "line {}: expected key = value, got {line:?}",
                lineno + 1
            )));
        };
        out.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(out)
}

pub fn seed_from_env() -> u64 {
    std::env::var(SEED_ENV)
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(DEFAULT_SEED)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_file_round_trip() {
        let parsed = parse_config_lines("# comment\nseed = 7\n\nn=2\ndelta = 0.75\n").unwrap();
        assert_eq!(parsed.get("seed").unwrap(), "7");
        assert_eq!(parsed.get("n").unwrap(), "2");
        assert_eq!(parsed.get("delta").unwrap(), "0.75");
        assert!(parse_config_lines("nonsense line").is_err());
    }

    #[test]
    fn params_parse_with_defaults() {
        let config = ExperimentConfig::new("demo", 1)
            .with_param("trials", 250)
            .with_param("delta", 0.5);
        assert_eq!(config.param_usize("trials", 10).unwrap(), 250);
        assert_eq!(config.param_usize("missing", 10).unwrap(), 10);
        assert_eq!(config.param_f64("delta", 0.1).unwrap(), 0.5);
        assert!(config.with_param("trials", "x").param_usize("trials", 1).is_err());
    }
}

//! Run configuration: flags, an optional `key = value` file, and the config
//! hash embedded in every report.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};
use tplab::numerics::{PrecisionConfig, DIGITS_ENV};
use tplab::transforms::{QuadratureConfig, Scheme, Truncation};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
}

/// Settings shared by all subcommands. The worker count is deliberately not
/// part of it: reports must not depend on it.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub digits: u32,
    pub seed: u64,
    pub quadrature: QuadratureConfig,
    pub output: OutputFormat,
}

impl RunConfig {
    pub fn precision(&self) -> PrecisionConfig {
        PrecisionConfig::new(self.digits).expect("validated on construction")
    }

    pub fn build(
        digits: Option<u32>,
        seed: Option<u64>,
        scheme: Option<Scheme>,
        level: Option<u32>,
        trunc_radius: Option<f64>,
        target_err: Option<f64>,
        output: OutputFormat,
    ) -> Result<Self, CliError> {
        let digits = match digits {
            Some(d) => d,
            None => match std::env::var(DIGITS_ENV) {
                Ok(v) => v.trim().parse().map_err(|_| CliError::Usage(format!("{DIGITS_ENV}={v:?} is not a number")))?,
                Err(_) => PrecisionConfig::default().digits,
            },
        };
        PrecisionConfig::new(digits)?;
        let defaults = QuadratureConfig::default();
        let quadrature = QuadratureConfig {
            scheme: scheme.unwrap_or(defaults.scheme),
            level: level.unwrap_or(defaults.level),
            trunc_radius: trunc_radius.map_or(Truncation::Auto, Truncation::Radius),
            target_abs_err: target_err,
        }
        .validated()?;
        Ok(RunConfig { digits, seed: seed.unwrap_or(0), quadrature, output })
    }
}

/// The run configuration plus the subcommand and its parameters, as
/// embedded in reports.
#[derive(Debug, Clone, Serialize)]
pub struct ConfigRecord {
    pub command: String,
    pub params: serde_json::Value,
    #[serde(flatten)]
    pub run: RunConfig,
    pub version: &'static str,
    pub hash: String,
}

impl ConfigRecord {
    pub fn new(command: &str, params: serde_json::Value, run: &RunConfig) -> Self {
        let body = serde_json::json!({ "command": command, "params": params, "run": run });
        let digest = Sha256::digest(body.to_string().as_bytes());
        let hash = digest.iter().map(|b| format!("{b:02x}")).collect();
        ConfigRecord {
            command: command.to_string(),
            params,
            run: run.clone(),
            version: env!("CARGO_PKG_VERSION"),
            hash,
        }
    }
}

/// Parses `key = value` lines; `#` starts a comment. Keys are flag names
/// without the leading dashes.
pub fn parse_config_file(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("config line {}: expected key = value", i + 1)))?;
        let k = k.trim().trim_start_matches("--").replace('_', "-");
        if k.is_empty() {
            return Err(CliError::Usage(format!("config line {}: empty key", i + 1)));
        }
        out.insert(k, v.trim().to_string());
    }
    Ok(out)
}

pub fn read_config_file(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    parse_config_file(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_lines() {
        let m = parse_config_file("# run\ndigits = 40\nmax_order=5  # inline\n\n--seed = 7\n").unwrap();
        assert_eq!(m["digits"], "40");
        assert_eq!(m["max-order"], "5");
        assert_eq!(m["seed"], "7");
        assert!(parse_config_file("digits 40").is_err());
    }

    #[test]
    fn hash_depends_on_params_only() {
        let run = RunConfig::build(Some(30), Some(1), None, None, None, None, OutputFormat::Json).unwrap();
        let a = ConfigRecord::new("tp", serde_json::json!({"trials": 5}), &run);
        let b = ConfigRecord::new("tp", serde_json::json!({"trials": 5}), &run);
        let c = ConfigRecord::new("tp", serde_json::json!({"trials": 6}), &run);
        assert_eq!(a.hash, b.hash);
        assert_ne!(a.hash, c.hash);
        assert_eq!(a.hash.len(), 64);
    }
}

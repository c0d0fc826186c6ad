//! Run configuration: defaults, config files, flags, and the header block
//! written with every table.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};

use crate::sweep;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Variance,
    ScanGamma,
    Optimize,
    Scaling,
    Spectrum,
    FieldScan,
    Validate,
}

impl Command {
    pub const ALL: [Command; 7] = [
        Command::Variance,
        Command::ScanGamma,
        Command::Optimize,
        Command::Scaling,
        Command::Spectrum,
        Command::FieldScan,
        Command::Validate,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Variance => "variance",
            Command::ScanGamma => "scan-gamma",
            Command::Optimize => "optimize",
            Command::Scaling => "scaling",
            Command::Spectrum => "spectrum",
            Command::FieldScan => "field-scan",
            Command::Validate => "validate",
        }
    }

    /// What the table shows.
    pub fn anchor(self) -> &'static str {
        match self {
            Command::Variance => "minimal variance at one operating point",
            Command::ScanGamma => "minimal variance, Sy variance and mean spin versus pumping rate",
            Command::Optimize => "optimal pumping rates and squeezing",
            Command::Scaling => "optimal squeezing versus cooperativity",
            Command::Spectrum => "Sy noise spectrum, field and atomic contributions",
            Command::FieldScan => "minimal variance versus intracavity field amplitude",
            Command::Validate => "self-consistency suites",
        }
    }

    /// Accepted keys and their defaults.
    pub fn defaults(self) -> &'static [(&'static str, &'static str)] {
        match self {
            Command::Variance => &[
                ("c", "100"),
                ("rho", "0.0005"),
                ("gamma_p", "5.5"),
                ("gamma_p_prime", "25"),
                ("n", "1e6"),
                ("delta_tilde", "0"),
                ("delta_c", "0"),
                ("gamma0_hz", ""),
            ],
            Command::ScanGamma => &[
                ("c", "100"),
                ("rho", "0.0005"),
                ("gamma_p", "2"),
                ("gamma_p_prime", "0.1:100:log200"),
                ("n", "1e6"),
                ("gamma0_hz", ""),
            ],
            Command::Optimize => &[("c", "100"), ("rho", "0.0005"), ("gamma0_hz", "")],
            Command::Scaling => &[("c_values", "100:1e6:log5"), ("rho", "0.0005")],
            Command::Spectrum => &[
                ("c", "100"),
                ("rho", "0.0005"),
                ("gamma_p", "5.5"),
                ("gamma_p_prime", "25"),
                ("n", "1e6"),
                ("omega_bar", "0.001:1000:log121"),
            ],
            Command::FieldScan => &[
                ("c", "100"),
                ("rho", "0.0005"),
                ("gamma_p", "1"),
                ("gamma_p_prime", "4"),
                ("n", "1e6"),
                ("amplitude", "0:20:lin81"),
            ],
            Command::Validate => &[("seed", "20061017"), ("points", "100")],
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> Result<Self> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s.trim())
            .ok_or_else(|| anyhow!("unknown command `{}`", s.trim()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => bail!("unknown format `{other}` (expected csv or json)"),
        }
    }
}

/// Keys that describe a file rather than configure a run.
const METADATA_KEYS: [&str; 3] = ["tool", "command", "anchor"];
/// Execution options accepted in config files but never echoed into headers.
const EXECUTION_KEYS: [&str; 1] = ["threads"];
/// Header lines carrying computed results start with this prefix.
pub const RESULT_PREFIX: &str = "result.";

pub fn normalize_key(key: &str) -> String {
    key.trim().to_ascii_lowercase().replace('-', "_")
}

/// Key-value pairs read from a config file or an earlier output header.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigFile {
    pub command: Option<Command>,
    pub values: BTreeMap<String, String>,
    pub threads: Option<usize>,
}

impl ConfigFile {
    /// Accepts `key = value` lines with optional `#` prefixes, so an output
    /// header can be fed back in. A JSON output file is read from its `meta`.
    pub fn parse(text: &str) -> Result<Self> {
        if text.trim_start().starts_with('{') {
            return Self::parse_json(text);
        }
        let mut out = ConfigFile::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            let body = match line.strip_prefix('#') {
                Some(rest) => rest.trim(),
                None if line.contains('=') => line,
                // First non-comment line without '=' ends a header block.
                None => break,
            };
            let Some((k, v)) = body.split_once('=') else {
                continue;
            };
            out.set(&normalize_key(k), v.trim()).with_context(|| format!("line {}", lineno + 1))?;
        }
        Ok(out)
    }

    fn parse_json(text: &str) -> Result<Self> {
        let doc: serde_json::Value = serde_json::from_str(text).context("invalid JSON")?;
        let meta = doc.get("meta").and_then(|m| m.as_object()).ok_or_else(|| anyhow!("JSON without `meta`"))?;
        let mut out = ConfigFile::default();
        if let Some(c) = meta.get("command").and_then(|v| v.as_str()) {
            out.set("command", c)?;
        }
        if let Some(cfg) = meta.get("config").and_then(|v| v.as_object()) {
            for (k, v) in cfg {
                let v = v.as_str().ok_or_else(|| anyhow!("config value for `{k}` must be a string"))?;
                out.set(&normalize_key(k), v)?;
            }
        }
        Ok(out)
    }

    fn set(&mut self, key: &str, value: &str) -> Result<()> {
        if key.starts_with(RESULT_PREFIX) || key == "tool" || key == "anchor" {
            return Ok(());
        }
        match key {
            "command" => self.command = Some(value.parse()?),
            "threads" => {
                self.threads = Some(value.parse().with_context(|| format!("invalid value for key `threads`: `{value}`"))?)
            }
            _ => {
                if !is_known_key(key) {
                    bail!("unknown key `{key}`");
                }
                self.values.insert(key.to_string(), value.to_string());
            }
        }
        Ok(())
    }
}

fn is_known_key(key: &str) -> bool {
    Command::ALL.iter().any(|c| c.defaults().iter().any(|(k, _)| *k == key))
        || METADATA_KEYS.contains(&key)
        || EXECUTION_KEYS.contains(&key)
}

/// Fully resolved run: the command plus one string per accepted key.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    /// In the order of [`Command::defaults`]; empty strings mean "unset".
    pub params: Vec<(String, String)>,
}

impl RunConfig {
    /// Defaults, then the config file, then explicit flags. Keys that the
    /// command does not accept are rejected by name.
    pub fn resolve(command: Command, file: &BTreeMap<String, String>, flags: &BTreeMap<String, String>) -> Result<Self> {
        let defaults = command.defaults();
        for key in file.keys().chain(flags.keys()) {
            if !defaults.iter().any(|(k, _)| k == key) {
                bail!("key `{key}` is not accepted by `{command}`");
            }
        }
        let params = defaults
            .iter()
            .map(|(k, d)| {
                let v = flags.get(*k).or_else(|| file.get(*k)).map(String::as_str).unwrap_or(d);
                (k.to_string(), v.trim().to_string())
            })
            .collect();
        let cfg = RunConfig { command, params };
        cfg.check()?;
        Ok(cfg)
    }

    fn raw(&self, key: &str) -> &str {
        self.params
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
            .unwrap_or_else(|| panic!("`{key}` is not a key of `{}`", self.command))
    }

    pub fn list(&self, key: &str) -> Result<Vec<f64>> {
        let values = sweep::parse(self.raw(key)).with_context(|| format!("invalid value for key `{key}`"))?;
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            bail!("invalid value for key `{key}`: {v} is not finite");
        }
        Ok(values)
    }

    pub fn scalar(&self, key: &str) -> Result<f64> {
        match self.list(key)?.as_slice() {
            [v] => Ok(*v),
            _ => bail!("invalid value for key `{key}`: expected a single number"),
        }
    }

    pub fn optional_scalar(&self, key: &str) -> Result<Option<f64>> {
        if self.raw(key).is_empty() {
            Ok(None)
        } else {
            self.scalar(key).map(Some)
        }
    }

    pub fn integer(&self, key: &str) -> Result<u64> {
        self.raw(key).parse().with_context(|| format!("invalid value for key `{key}`: expected an integer"))
    }

    /// Rejects malformed numbers and negative rates up front.
    fn check(&self) -> Result<()> {
        for (key, value) in &self.params {
            if value.is_empty() {
                continue;
            }
            match key.as_str() {
                "seed" | "points" => {
                    self.integer(key)?;
                }
                _ => {
                    let values = self.list(key)?;
                    let non_negative = ["gamma_p", "gamma_p_prime", "amplitude", "c", "c_values", "rho", "n", "gamma0_hz"];
                    if non_negative.contains(&key.as_str()) {
                        if let Some(v) = values.iter().find(|v| **v < 0.0) {
                            bail!("invalid value for key `{key}`: {v} is negative");
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn header_lines(&self, version: &str) -> Vec<(String, String)> {
        let mut lines = vec![
            ("tool".to_string(), format!("eitsqz {version}")),
            ("command".to_string(), self.command.name().to_string()),
            ("anchor".to_string(), self.command.anchor().to_string()),
        ];
        lines.extend(self.params.iter().cloned());
        lines
    }
}

//! Flat `key = value` experiment configuration.
//!
//! Grammar, one entry per line:
//!
//! ```text
//! # comment
//! key = value        # trailing comments are allowed
//! ```
//!
//! Keys are case-sensitive; lists are comma separated. Later entries override
//! earlier ones, and command-line overrides are applied last with the same
//! [`ExperimentConfig::set`].

use std::path::{Path, PathBuf};
use std::time::Duration;

use thiserror::Error;

use crate::compress::SchemaFormat;
use crate::harness::HttpConfig;
use crate::tokens::TokenCountProfile;

pub const DEFAULT_WINDOWS: [usize; 3] = [8192, 16_384, 32_768];
pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("invalid value for {key}: {message}")]
    Value { key: String, message: String },
    #[error("unknown key {0:?}")]
    UnknownKey(String),
    #[error("cannot read config {path}: {message}")]
    Io { path: String, message: String },
}

#[derive(Debug, Clone, PartialEq)]
pub enum ClientSpec {
    Oracle { epsilon: f64, seed: u64 },
    Http(HttpConfig),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub benchmark: Option<PathBuf>,
    pub formats: Vec<SchemaFormat>,
    pub windows: Vec<usize>,
    pub client: ClientSpec,
    pub counter: TokenCountProfile,
    pub out_dir: PathBuf,
    pub seed: u64,
    pub workers: usize,
    pub max_iters: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            benchmark: None,
            formats: vec![SchemaFormat::Json, SchemaFormat::Conservative],
            windows: DEFAULT_WINDOWS.to_vec(),
            client: ClientSpec::Oracle { epsilon: 0.0, seed: 0 },
            counter: TokenCountProfile::default(),
            out_dir: PathBuf::from("runs"),
            seed: DEFAULT_SEED,
            workers: 4,
            max_iters: crate::harness::DEFAULT_MAX_ITERS,
        }
    }
}

fn bad(key: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Value { key: key.to_string(), message: message.into() }
}

fn num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, ConfigError>
where
    T::Err: std::fmt::Display,
{
    value.parse().map_err(|e: T::Err| bad(key, e.to_string()))
}

fn list<T>(key: &str, value: &str, f: impl Fn(&str) -> Result<T, ConfigError>) -> Result<Vec<T>, ConfigError> {
    let items: Vec<T> = value.split(',').map(str::trim).filter(|s| !s.is_empty()).map(f).collect::<Result<_, _>>()?;
    if items.is_empty() {
        return Err(bad(key, "empty list"));
    }
    Ok(items)
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = Self::default();
        cfg.merge(text)?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::Io { path: path.display().to_string(), message: e.to_string() })?;
        Self::parse(&text)
    }

    pub fn merge(&mut self, text: &str) -> Result<(), ConfigError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(ConfigError::Syntax {
                    line: i + 1,
                    message: format!("expected key = value, got {line:?}"),
                });
            };
            let key = key.trim();
            if key.is_empty() {
                return Err(ConfigError::Syntax { line: i + 1, message: "empty key".into() });
            }
            self.set(key, value.trim())?;
        }
        Ok(())
    }

    fn http(&mut self) -> &mut HttpConfig {
        if !matches!(self.client, ClientSpec::Http(_)) {
            self.client = ClientSpec::Http(HttpConfig::new("", ""));
        }
        match &mut self.client {
            ClientSpec::Http(h) => h,
            ClientSpec::Oracle { .. } => unreachable!(),
        }
    }

    fn oracle(&mut self) -> (&mut f64, &mut u64) {
        if !matches!(self.client, ClientSpec::Oracle { .. }) {
            self.client = ClientSpec::Oracle { epsilon: 0.0, seed: 0 };
        }
        match &mut self.client {
            ClientSpec::Oracle { epsilon, seed } => (epsilon, seed),
            ClientSpec::Http(_) => unreachable!(),
        }
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        match key {
            "benchmark" => self.benchmark = Some(PathBuf::from(value)),
            "formats" => self.formats = list(key, value, |s| s.parse().map_err(|e: String| bad(key, e)))?,
            "windows" => {
                self.windows = list(key, value, |s| {
                    let w: usize = num(key, s)?;
                    if w == 0 {
                        return Err(bad(key, "windows must be positive"));
                    }
                    Ok(w)
                })?
            }
            "client" => match value {
                "oracle" => {
                    self.oracle();
                }
                "http" => {
                    self.http();
                }
                other => return Err(bad(key, format!("expected oracle or http, got {other:?}"))),
            },
            "epsilon" => {
                let e: f64 = num(key, value)?;
                if !(0.0..=1.0).contains(&e) {
                    return Err(bad(key, "must lie in [0, 1]"));
                }
                *self.oracle().0 = e;
            }
            "oracle_seed" => *self.oracle().1 = num(key, value)?,
            "endpoint" => self.http().base_url = value.to_string(),
            "model" => self.http().model = value.to_string(),
            "api_key_env" => self.http().api_key_env = Some(value.to_string()),
            "timeout_secs" => self.http().timeout = Duration::from_secs_f64(num(key, value)?),
            "max_retries" => self.http().max_retries = num(key, value)?,
            "backoff_ms" => self.http().backoff = Duration::from_millis(num(key, value)?),
            "bytes_per_token" => {
                let b = num(key, value)?;
                self.counter = TokenCountProfile::new(b, self.counter.per_message_overhead())
                    .map_err(|e| bad(key, e.to_string()))?;
            }
            "message_overhead" => {
                let o = num(key, value)?;
                self.counter =
                    TokenCountProfile::new(self.counter.bytes_per_token(), o).map_err(|e| bad(key, e.to_string()))?;
            }
            "out" => self.out_dir = PathBuf::from(value),
            "seed" => self.seed = num(key, value)?,
            "workers" => {
                self.workers = num(key, value)?;
                if self.workers == 0 {
                    return Err(bad(key, "need at least one worker"));
                }
            }
            "max_iters" => self.max_iters = num(key, value)?,
            other => return Err(ConfigError::UnknownKey(other.to_string())),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.benchmark.is_none() {
            return Err(bad("benchmark", "no benchmark path given"));
        }
        if let ClientSpec::Http(h) = &self.client {
            if h.base_url.is_empty() || h.model.is_empty() {
                return Err(bad("client", "http client needs endpoint and model"));
            }
        }
        Ok(())
    }
}

//! Run configuration: economic parameters, study area, time window, solver
//! choice and input column names, all under flat keys.
//!
//! Layers apply in order: built-in defaults, a TOML file, `RIDEPOOL_<KEY>`
//! environment variables, then explicit `key=value` overrides.

use std::path::Path;

use chrono::NaiveTime;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bnb::BnbOptions;
use crate::grouping::GroupingMode;
use crate::model::{EconomicParams, ValidationOptions};

pub const ENV_PREFIX: &str = "RIDEPOOL_";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },
    #[error("invalid config: {0}")]
    Parse(String),
    #[error("unknown config key `{0}`")]
    UnknownKey(String),
    #[error("bad value for `{key}`: {msg}")]
    BadValue { key: String, msg: String },
    #[error("invalid config: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverChoice {
    Flow,
    Bnb,
    #[default]
    Both,
}

impl SolverChoice {
    pub fn flow(self) -> bool {
        matches!(self, Self::Flow | Self::Both)
    }

    pub fn bnb(self) -> bool {
        matches!(self, Self::Bnb | Self::Both)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct InstanceConfig {
    #[serde(flatten)]
    pub params: EconomicParams,
    pub min_lon: f64,
    pub min_lat: f64,
    pub max_lon: f64,
    pub max_lat: f64,
    /// Local time of day, `HH:MM` or `HH:MM:SS`.
    pub window_start: String,
    pub window_end: String,
    pub seed: u64,
    pub solver: SolverChoice,
    pub mode: GroupingMode,
    /// Latest arrival is departure plus this factor times the direct drive.
    pub arrival_slack: f64,
    /// Vehicles placed in the study area for ingested demand.
    pub fleet_size: usize,
    pub delimiter: String,
    pub pickup_time_col: String,
    pub pickup_lon_col: String,
    pub pickup_lat_col: String,
    pub dropoff_lon_col: String,
    pub dropoff_lat_col: String,
    pub dominance: bool,
    /// Branch-and-bound gives up after this many search nodes; 0 disables.
    pub node_limit: u64,
    pub strict_arrival: bool,
}

impl Default for InstanceConfig {
    fn default() -> Self {
        Self {
            params: EconomicParams::default(),
            min_lon: -74.000,
            min_lat: 40.740,
            max_lon: -73.970,
            max_lat: 40.770,
            window_start: "08:15".into(),
            window_end: "08:30".into(),
            seed: 0,
            solver: SolverChoice::Both,
            mode: GroupingMode::Strict,
            arrival_slack: 1.5,
            fleet_size: 20,
            delimiter: ",".into(),
            pickup_time_col: "tpep_pickup_datetime".into(),
            pickup_lon_col: "pickup_longitude".into(),
            pickup_lat_col: "pickup_latitude".into(),
            dropoff_lon_col: "dropoff_longitude".into(),
            dropoff_lat_col: "dropoff_latitude".into(),
            dominance: false,
            node_limit: 5_000_000,
            strict_arrival: false,
        }
    }
}

impl InstanceConfig {
    /// Defaults, then `file` if given, then the environment.
    pub fn load(file: Option<&Path>) -> Result<Self, ConfigError> {
        let mut table = Self::default().to_table();
        if let Some(path) = file {
            let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
                path: path.display().to_string(),
                source,
            })?;
            let parsed: toml::Table = text.parse().map_err(|e: toml::de::Error| ConfigError::Parse(e.to_string()))?;
            for (k, v) in parsed {
                let slot = table.get_mut(&k).ok_or_else(|| ConfigError::UnknownKey(k.clone()))?;
                *slot = coerce(&k, slot, v)?;
            }
        }
        apply_env(&mut table, std::env::vars())?;
        Self::from_table(table)
    }

    /// Applies `key=value` pairs on top of `self`.
    pub fn with_overrides<S: AsRef<str>>(self, pairs: &[S]) -> Result<Self, ConfigError> {
        let mut table = self.to_table();
        for pair in pairs {
            let pair = pair.as_ref();
            let (k, v) = pair
                .split_once('=')
                .ok_or_else(|| ConfigError::Parse(format!("expected key=value, got `{pair}`")))?;
            set_from_str(&mut table, k.trim(), v.trim())?;
        }
        Self::from_table(table)
    }

    fn to_table(&self) -> toml::Table {
        toml::Table::try_from(self).expect("config serializes to a table")
    }

    fn from_table(table: toml::Table) -> Result<Self, ConfigError> {
        let cfg: Self = toml::Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| ConfigError::Parse(e.to_string()))?;
        cfg.check()?;
        Ok(cfg)
    }

    pub fn check(&self) -> Result<(), ConfigError> {
        self.params
            .check()
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        if !(self.min_lon < self.max_lon && self.min_lat < self.max_lat) {
            return Err(ConfigError::Invalid("bounding box is degenerate".into()));
        }
        let (start, end) = self.window()?;
        if start >= end {
            return Err(ConfigError::Invalid("window_start must precede window_end".into()));
        }
        if !(self.arrival_slack.is_finite() && self.arrival_slack >= 1.0) {
            return Err(ConfigError::Invalid("arrival_slack must be at least 1".into()));
        }
        if self.delimiter.len() != 1 {
            return Err(ConfigError::Invalid("delimiter must be a single byte".into()));
        }
        Ok(())
    }

    /// Window bounds in seconds after midnight.
    pub fn window(&self) -> Result<(u32, u32), ConfigError> {
        Ok((parse_time_of_day(&self.window_start)?, parse_time_of_day(&self.window_end)?))
    }

    pub fn bnb_options(&self) -> BnbOptions {
        BnbOptions {
            dominance: self.dominance,
            node_limit: (self.node_limit > 0).then_some(self.node_limit),
        }
    }

    pub fn validation_options(&self) -> ValidationOptions {
        ValidationOptions {
            strict_arrival: self.strict_arrival,
        }
    }
}

fn parse_time_of_day(s: &str) -> Result<u32, ConfigError> {
    use chrono::Timelike;
    NaiveTime::parse_from_str(s, "%H:%M:%S")
        .or_else(|_| NaiveTime::parse_from_str(s, "%H:%M"))
        .map(|t| t.num_seconds_from_midnight())
        .map_err(|e| ConfigError::BadValue {
            key: "window".into(),
            msg: format!("`{s}`: {e}"),
        })
}

fn apply_env<I>(table: &mut toml::Table, vars: I) -> Result<(), ConfigError>
where
    I: IntoIterator<Item = (String, String)>,
{
    for (name, value) in vars {
        if let Some(key) = name.strip_prefix(ENV_PREFIX) {
            set_from_str(table, &key.to_ascii_lowercase(), &value)?;
        }
    }
    Ok(())
}

fn set_from_str(table: &mut toml::Table, key: &str, raw: &str) -> Result<(), ConfigError> {
    let slot = table
        .get_mut(key)
        .ok_or_else(|| ConfigError::UnknownKey(key.to_string()))?;
    let bad = |msg: String| ConfigError::BadValue {
        key: key.to_string(),
        msg,
    };
    *slot = match slot {
        toml::Value::Float(_) => toml::Value::Float(raw.parse().map_err(|e| bad(format!("{e}")))?),
        toml::Value::Integer(_) => toml::Value::Integer(raw.parse().map_err(|e| bad(format!("{e}")))?),
        toml::Value::Boolean(_) => toml::Value::Boolean(raw.parse().map_err(|e| bad(format!("{e}")))?),
        _ => toml::Value::String(raw.to_string()),
    };
    Ok(())
}

/// Integers are accepted where the default is a float.
fn coerce(key: &str, slot: &toml::Value, v: toml::Value) -> Result<toml::Value, ConfigError> {
    match (slot, v) {
        (toml::Value::Float(_), toml::Value::Integer(i)) => Ok(toml::Value::Float(i as f64)),
        (s, v) if s.same_type(&v) => Ok(v),
        (s, v) => Err(ConfigError::BadValue {
            key: key.to_string(),
            msg: format!("expected {}, got {}", s.type_str(), v.type_str()),
        }),
    }
}

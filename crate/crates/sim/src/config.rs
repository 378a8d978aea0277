//! Experiment configuration: reference-scenario defaults overridden by a
//! flat `key = value` text file.
//!
//! The format is deliberately trivial to parse from any language: one
//! assignment per line, `#` starts a comment, list values are separated by
//! commas. Unknown and duplicate keys are errors so typos cannot silently
//! fall back to defaults.

use std::path::Path;
use std::str::FromStr;

use dwrosn_core::topology::TopologyError;
use dwrosn_core::{ConstellationSpec, LayerKind, LayerSpec, NodeSet, Scheme};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: duplicate key `{key}`")]
    DuplicateKey { line: usize, key: String },
    #[error("line {line}: bad value for `{key}`: {reason}")]
    BadValue { line: usize, key: String, reason: String },
    #[error("invalid configuration: {0}")]
    Invalid(String),
    #[error("cannot read config: {0}")]
    Io(#[from] std::io::Error),
}

/// Everything one experiment run depends on.
///
/// `d_geo` is a list so a single run can sweep the GEO terminal budget;
/// every other parameter is shared across the sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub constellation: ConstellationSpec,
    /// Slot length, seconds.
    pub slot_dt_s: f64,
    /// Total simulated span, seconds; must be a whole number of slots.
    pub horizon_s: f64,
    /// Visibility sampling step, seconds.
    pub step_s: f64,
    /// Pool size per (slot, scheme) cell.
    pub count: usize,
    /// Schemes to run, in output order.
    pub schemes: Vec<Scheme>,
    /// Terminals per LEO node.
    pub d_leo: u32,
    /// Terminals per GEO node, one entry per sweep point.
    pub d_geo: Vec<u32>,
    /// Hop bounds reported by the connectivity and RWA sweep tables.
    pub max_hops: Vec<u32>,
    /// Candidate paths considered per request.
    pub k_cap: usize,
    /// RWA repetitions per topology.
    pub reps: usize,
    pub seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            constellation: ConstellationSpec::reference(),
            slot_dt_s: 2000.0,
            horizon_s: 20_000.0,
            step_s: 1.0,
            count: 100,
            schemes: Scheme::ALL.to_vec(),
            d_leo: 5,
            d_geo: vec![6],
            max_hops: (1..=8).collect(),
            k_cap: 16,
            reps: 10,
            seed: 1,
        }
    }
}

impl ExperimentConfig {
    /// Parses overrides on top of the defaults and validates the result.
    pub fn parse_str(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = ExperimentConfig::default();
        let mut seen: Vec<String> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or(ConfigError::Syntax { line })?;
            if key.is_empty() {
                return Err(ConfigError::Syntax { line });
            }
            if seen.iter().any(|s| s == key) {
                return Err(ConfigError::DuplicateKey { line, key: key.into() });
            }
            seen.push(key.to_string());
            cfg.apply(key, value, line)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        Self::parse_str(&std::fs::read_to_string(path)?)
    }

    fn apply(&mut self, key: &str, value: &str, line: usize) -> Result<(), ConfigError> {
        fn parse<T: FromStr>(key: &str, value: &str, line: usize) -> Result<T, ConfigError>
        where
            T::Err: std::fmt::Display,
        {
            value.parse().map_err(|e: T::Err| ConfigError::BadValue {
                line,
                key: key.into(),
                reason: e.to_string(),
            })
        }
        fn parse_list<T: FromStr>(key: &str, value: &str, line: usize) -> Result<Vec<T>, ConfigError>
        where
            T::Err: std::fmt::Display,
        {
            if value.is_empty() {
                return Ok(Vec::new());
            }
            value.split(',').map(|item| parse(key, item.trim(), line)).collect()
        }
        fn parse_schemes(key: &str, value: &str, line: usize) -> Result<Vec<Scheme>, ConfigError> {
            if value.is_empty() {
                return Ok(Vec::new());
            }
            value
                .split(',')
                .map(|item| {
                    let item = item.trim();
                    item.parse().map_err(|_| ConfigError::BadValue {
                        line,
                        key: key.into(),
                        reason: format!("unknown scheme `{item}` (expected peim, act, or greedy)"),
                    })
                })
                .collect()
        }

        let leo = 0;
        let geo = 1;
        match key {
            "leo.sats" => self.constellation.layers[leo].total_sats = parse(key, value, line)?,
            "leo.planes" => self.constellation.layers[leo].planes = parse(key, value, line)?,
            "leo.phase" => self.constellation.layers[leo].phase_factor = parse(key, value, line)?,
            "leo.alt_km" => self.constellation.layers[leo].altitude_km = parse(key, value, line)?,
            "leo.incl_deg" => {
                self.constellation.layers[leo].inclination_deg = parse(key, value, line)?
            }
            "leo.period_s" => self.constellation.layers[leo].period_s = parse(key, value, line)?,
            "geo.sats" => self.constellation.layers[geo].total_sats = parse(key, value, line)?,
            "geo.planes" => self.constellation.layers[geo].planes = parse(key, value, line)?,
            "geo.phase" => self.constellation.layers[geo].phase_factor = parse(key, value, line)?,
            "geo.alt_km" => self.constellation.layers[geo].altitude_km = parse(key, value, line)?,
            "geo.incl_deg" => {
                self.constellation.layers[geo].inclination_deg = parse(key, value, line)?
            }
            "geo.period_s" => self.constellation.layers[geo].period_s = parse(key, value, line)?,
            "earth.radius_km" => self.constellation.earth_radius_km = parse(key, value, line)?,
            "earth.clearance_km" => self.constellation.clearance_km = parse(key, value, line)?,
            "slot.dt_s" => self.slot_dt_s = parse(key, value, line)?,
            "slot.horizon_s" => self.horizon_s = parse(key, value, line)?,
            "slot.step_s" => self.step_s = parse(key, value, line)?,
            "las.count" => self.count = parse(key, value, line)?,
            "las.schemes" => self.schemes = parse_schemes(key, value, line)?,
            "nodes.d_leo" => self.d_leo = parse(key, value, line)?,
            "nodes.d_geo" => self.d_geo = parse_list(key, value, line)?,
            "rwa.max_hops" => self.max_hops = parse_list(key, value, line)?,
            "rwa.k_cap" => self.k_cap = parse(key, value, line)?,
            "rwa.reps" => self.reps = parse(key, value, line)?,
            "seed" => self.seed = parse(key, value, line)?,
            _ => return Err(ConfigError::UnknownKey { line, key: key.into() }),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.constellation
            .validate()
            .map_err(|e| ConfigError::Invalid(format!("constellation: {e}")))?;
        if self.constellation.layers.len() != 2
            || self.constellation.layers[0].kind != LayerKind::Leo
            || self.constellation.layers[1].kind != LayerKind::Geo
        {
            return Err(ConfigError::Invalid("expected a LEO layer then a GEO layer".into()));
        }
        if !(self.slot_dt_s > 0.0) || !(self.step_s > 0.0) || !(self.horizon_s > 0.0) {
            return Err(ConfigError::Invalid(
                "slot.dt_s, slot.step_s, and slot.horizon_s must be positive".into(),
            ));
        }
        let ratio = self.horizon_s / self.slot_dt_s;
        if (ratio - ratio.round()).abs() > 1e-9 || ratio.round() < 1.0 {
            return Err(ConfigError::Invalid(
                "slot.horizon_s must be a positive whole multiple of slot.dt_s".into(),
            ));
        }
        if self.count == 0 || self.reps == 0 || self.k_cap == 0 {
            return Err(ConfigError::Invalid(
                "las.count, rwa.reps, and rwa.k_cap must be at least 1".into(),
            ));
        }
        if self.schemes.is_empty() {
            return Err(ConfigError::Invalid("las.schemes must name at least one scheme".into()));
        }
        if self.d_leo == 0 || self.d_geo.is_empty() || self.d_geo.contains(&0) {
            return Err(ConfigError::Invalid(
                "nodes.d_leo and every nodes.d_geo entry must be at least 1".into(),
            ));
        }
        if self.max_hops.is_empty() || self.max_hops.contains(&0) {
            return Err(ConfigError::Invalid(
                "rwa.max_hops must list at least one positive bound".into(),
            ));
        }
        Ok(())
    }

    /// Number of slots covered by the horizon.
    pub fn slot_count(&self) -> usize {
        (self.horizon_s / self.slot_dt_s).round() as usize
    }

    /// Start time of slot `s`, seconds.
    pub fn slot_start_s(&self, slot: usize) -> f64 {
        slot as f64 * self.slot_dt_s
    }

    /// Node set for one GEO terminal budget.
    pub fn node_set(&self, d_geo: u32) -> Result<NodeSet, TopologyError> {
        NodeSet::by_layer(&self.constellation, &[self.d_leo, d_geo])
    }

    /// The LEO layer parameters.
    pub fn leo(&self) -> &LayerSpec {
        &self.constellation.layers[0]
    }

    /// The GEO layer parameters.
    pub fn geo(&self) -> &LayerSpec {
        &self.constellation.layers[1]
    }
}

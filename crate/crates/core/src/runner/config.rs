//! Experiment configs: line-oriented `key = value` files with `[weights]`
//! sections, or the same structure as JSON.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::weights::{PerturbMode, WeightPair, WeightSequence};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Entropy,
    Dimension,
    Sample,
    WindowGap,
    LemmaScan,
    Continuity,
    Counterexample,
}

impl Command {
    pub const ALL: [Command; 7] = [
        Command::Entropy,
        Command::Dimension,
        Command::Sample,
        Command::WindowGap,
        Command::LemmaScan,
        Command::Continuity,
        Command::Counterexample,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Command::Entropy => "entropy",
            Command::Dimension => "dimension",
            Command::Sample => "sample",
            Command::WindowGap => "window-gap",
            Command::LemmaScan => "lemma-scan",
            Command::Continuity => "continuity",
            Command::Counterexample => "counterexample",
        }
    }

    fn needs_weights(&self) -> bool {
        !matches!(self, Command::LemmaScan | Command::Counterexample)
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::param(format!("unknown command `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightsKind {
    Constant,
    Periodic,
    Explicit,
    Random,
    DoublingBlocks,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightsConfig {
    pub kind: WeightsKind,
    /// The constant pair, the period, the explicit prefix, or the two
    /// doubling-block regimes.
    #[serde(default, deserialize_with = "de_pairs", skip_serializing_if = "Option::is_none")]
    pub pairs: Option<Vec<[f64; 2]>>,
    #[serde(default, deserialize_with = "de_pairs", skip_serializing_if = "Option::is_none")]
    pub tail: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Prefix length for `random`, first block length for `doubling-blocks`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub period: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub low: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub high: Option<f64>,
}

const WEIGHTS_KEYS: [&str; 7] = ["kind", "pairs", "tail", "seed", "period", "low", "high"];

#[derive(Deserialize)]
#[serde(untagged)]
enum PairsInput {
    Nested(Vec<[f64; 2]>),
    Flat(Vec<f64>),
    Text(String),
}

fn de_pairs<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<Vec<[f64; 2]>>, D::Error> {
    use serde::de::Error as _;
    let pairs = match PairsInput::deserialize(d)? {
        PairsInput::Nested(v) => v,
        PairsInput::Flat(v) => {
            if v.len() % 2 != 0 {
                return Err(D::Error::custom("a flat pair list needs an even number of values"));
            }
            v.chunks(2).map(|c| [c[0], c[1]]).collect()
        }
        PairsInput::Text(s) => parse_pair_text(&s).map_err(D::Error::custom)?,
    };
    Ok(Some(pairs))
}

/// `"0.2,0.8; 0.6,0.4"`.
fn parse_pair_text(s: &str) -> std::result::Result<Vec<[f64; 2]>, String> {
    s.split(';')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| {
            let nums: Vec<&str> = p.split(',').map(str::trim).collect();
            match nums.as_slice() {
                [a, b] => Ok([
                    a.parse().map_err(|_| format!("bad number `{a}`"))?,
                    b.parse().map_err(|_| format!("bad number `{b}`"))?,
                ]),
                _ => Err(format!("`{p}` is not a `p,q` pair")),
            }
        })
        .collect()
}

fn to_pairs(v: &[[f64; 2]]) -> Vec<WeightPair> {
    v.iter().map(|&[p, q]| WeightPair::new(p, q)).collect()
}

impl WeightsConfig {
    pub fn build(&self) -> Result<WeightSequence> {
        let need = |field: &Option<Vec<[f64; 2]>>, name: &str| {
            field
                .as_ref()
                .filter(|v| !v.is_empty())
                .map(|v| to_pairs(v))
                .ok_or_else(|| config_err("weights", format!("`{name}` is required for this kind")))
        };
        let default_tail = || vec![WeightPair::new(0.5, 0.5)];
        match self.kind {
            WeightsKind::Constant => {
                let pairs = need(&self.pairs, "pairs")?;
                if pairs.len() != 1 {
                    return Err(config_err("weights.pairs", "constant weights take exactly one pair"));
                }
                WeightSequence::constant(pairs[0].p, pairs[0].q)
            }
            WeightsKind::Periodic => WeightSequence::periodic(need(&self.pairs, "pairs")?),
            WeightsKind::Explicit => WeightSequence::explicit(
                need(&self.pairs, "pairs")?,
                self.tail.as_deref().map_or_else(default_tail, to_pairs),
            ),
            WeightsKind::Random => WeightSequence::random(
                self.seed.unwrap_or(0),
                self.period.unwrap_or(64),
                self.low.unwrap_or(0.0),
                self.high.unwrap_or(1.0),
                self.tail.as_deref().map_or_else(default_tail, to_pairs),
            ),
            WeightsKind::DoublingBlocks => {
                let pairs = need(&self.pairs, "pairs")?;
                if pairs.len() != 2 {
                    return Err(config_err(
                        "weights.pairs",
                        "doubling blocks take exactly two pairs",
                    ));
                }
                WeightSequence::doubling_blocks(pairs[0], pairs[1], self.period.unwrap_or(1))
            }
        }
    }
}

fn d_horizon() -> usize {
    10_000
}
fn d_window() -> usize {
    1_000
}
fn d_depth() -> usize {
    10_000
}
fn d_paths() -> usize {
    200
}
fn d_checkpoints() -> Vec<usize> {
    vec![100, 1_000, 10_000]
}
fn d_zetas() -> Vec<f64> {
    vec![0.1, 0.05, 0.02, 0.01]
}
fn d_perturbation() -> PerturbMode {
    PerturbMode::UniformShift
}
fn d_epsilon() -> f64 {
    0.1
}
fn d_delta() -> f64 {
    0.01
}
fn d_stages() -> usize {
    3
}
fn d_n_max() -> usize {
    200
}
fn d_k_max() -> usize {
    500
}
fn d_grid_step() -> f64 {
    0.01
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub command: Option<Command>,
    #[serde(default)]
    pub weights: Option<WeightsConfig>,
    #[serde(default = "d_horizon")]
    pub horizon: usize,
    #[serde(default = "d_window")]
    pub window: usize,
    #[serde(default = "d_depth")]
    pub depth: usize,
    #[serde(default = "d_paths")]
    pub paths: usize,
    #[serde(default = "d_checkpoints")]
    pub checkpoints: Vec<usize>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default = "d_zetas")]
    pub zetas: Vec<f64>,
    #[serde(default = "d_perturbation")]
    pub perturbation: PerturbMode,
    #[serde(default = "d_epsilon")]
    pub epsilon: f64,
    #[serde(default = "d_delta")]
    pub delta: f64,
    #[serde(default = "d_stages")]
    pub stages: usize,
    #[serde(default = "d_n_max")]
    pub n_max: usize,
    #[serde(default = "d_k_max")]
    pub k_max: usize,
    #[serde(default = "d_grid_step")]
    pub grid_step: f64,
    #[serde(default)]
    pub oracle: bool,
}

const TOP_KEYS: [&str; 18] = [
    "command",
    "weights",
    "horizon",
    "window",
    "depth",
    "paths",
    "checkpoints",
    "seed",
    "output_dir",
    "zetas",
    "perturbation",
    "epsilon",
    "delta",
    "stages",
    "n_max",
    "k_max",
    "grid_step",
    "oracle",
];

fn config_err(location: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Config {
        location: location.into(),
        message: message.into(),
    }
}

impl ExperimentConfig {
    /// Reads a config file; JSON when the first non-blank character is `{`.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_err(path.display().to_string(), e.to_string()))?;
        let label = path.display().to_string();
        if text.trim_start().starts_with('{') {
            Self::from_json_str(&text, &label)
        } else {
            Self::from_key_value_str(&text, &label)
        }
    }

    pub fn from_json_str(text: &str, label: &str) -> Result<Self> {
        let value: Value =
            serde_json::from_str(text).map_err(|e| config_err(label, e.to_string()))?;
        if let Some(obj) = value.as_object() {
            check_keys(obj.keys(), &TOP_KEYS, label)?;
            if let Some(w) = obj.get("weights").and_then(Value::as_object) {
                check_keys(w.keys(), &WEIGHTS_KEYS, &format!("{label} [weights]"))?;
            }
        }
        Self::from_value(value, label)
    }

    pub fn from_key_value_str(text: &str, label: &str) -> Result<Self> {
        let mut top = Map::new();
        let mut weights = Map::new();
        let mut in_weights = false;
        for (i, raw) in text.lines().enumerate() {
            let at = format!("{label}:{}", i + 1);
            let line = strip_comment(raw).trim();
            if line.is_empty() {
                continue;
            }
            if let Some(section) = line.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
                match section.trim() {
                    "weights" => in_weights = true,
                    other => return Err(config_err(at, format!("unknown section `[{other}]`"))),
                }
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(config_err(at, format!("expected `key = value`, found `{line}`")));
            };
            let key = key.trim();
            let (allowed, map) = if in_weights {
                (&WEIGHTS_KEYS[..], &mut weights)
            } else {
                (&TOP_KEYS[..], &mut top)
            };
            if !allowed.contains(&key) || (!in_weights && key == "weights") {
                return Err(config_err(at, format!("unknown key `{key}`")));
            }
            if map.contains_key(key) {
                return Err(config_err(at, format!("duplicate key `{key}`")));
            }
            let parsed = parse_scalar(value.trim()).map_err(|m| config_err(&at, m))?;
            map.insert(key.to_string(), parsed);
        }
        if in_weights || !weights.is_empty() {
            top.insert("weights".into(), Value::Object(weights));
        }
        Self::from_value(Value::Object(top), label)
    }

    fn from_value(value: Value, label: &str) -> Result<Self> {
        serde_json::from_value(value).map_err(|e| config_err(label, e.to_string()))
    }

    /// Checks the parameters `command` reads.
    pub fn validate(&self, command: Command) -> Result<()> {
        if let Some(c) = self.command {
            if c != command {
                return Err(config_err(
                    "command",
                    format!("config declares `{c}` but `{command}` was requested"),
                ));
            }
        }
        if command.needs_weights() && self.weights.is_none() {
            return Err(config_err("weights", format!("`{command}` needs a [weights] section")));
        }
        Ok(())
    }
}

fn check_keys<'a>(keys: impl Iterator<Item = &'a String>, allowed: &[&str], label: &str) -> Result<()> {
    for k in keys {
        if !allowed.contains(&k.as_str()) {
            return Err(config_err(label, format!("unknown key `{k}`")));
        }
    }
    Ok(())
}

fn strip_comment(line: &str) -> &str {
    let mut quoted = false;
    for (i, ch) in line.char_indices() {
        match ch {
            '"' => quoted = !quoted,
            '#' if !quoted => return &line[..i],
            _ => {}
        }
    }
    line
}

/// Integers, floats, booleans, JSON arrays, quoted or bare strings, and
/// comma-separated number lists.
fn parse_scalar(v: &str) -> std::result::Result<Value, String> {
    if v.is_empty() {
        return Err("missing value".into());
    }
    if v.starts_with('[') || v.starts_with('"') {
        return serde_json::from_str(v).map_err(|e| format!("bad value `{v}`: {e}"));
    }
    match v {
        "true" => return Ok(Value::Bool(true)),
        "false" => return Ok(Value::Bool(false)),
        _ => {}
    }
    if let Some(n) = parse_number(v) {
        return Ok(n);
    }
    if v.contains(',') && !v.contains(';') {
        let items: Option<Vec<Value>> = v.split(',').map(|s| parse_number(s.trim())).collect();
        if let Some(items) = items {
            return Ok(Value::Array(items));
        }
    }
    Ok(Value::String(v.to_string()))
}

fn parse_number(s: &str) -> Option<Value> {
    if let Ok(i) = s.parse::<u64>() {
        return Some(Value::from(i));
    }
    if let Ok(i) = s.parse::<i64>() {
        return Some(Value::from(i));
    }
    let x: f64 = s.parse().ok()?;
    if !s.contains('.') && x.fract() == 0.0 && x.abs() < 9.0e15 {
        // `1e4` is an integer
        return Some(if x >= 0.0 {
            Value::from(x as u64)
        } else {
            Value::from(x as i64)
        });
    }
    serde_json::Number::from_f64(x).map(Value::Number)
}

//! Flat `key = value` experiment files for the command-line tool.
//!
//! Blank lines and `#` comments are ignored. Keys are the long flag names
//! with `-` or `_` accepted interchangeably; unknown keys are an error.
//! Later assignments win, so flag overrides are applied after the file.
//!
//! ```text
//! # example
//! data = prices.csv
//! agent_a = buy_and_hold
//! agent_b = momentum:20
//! tau = 0.25
//! group = 3
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::agents::AgentSpec;
use crate::backtest::BacktestConfig;
use crate::data::parse_date;
use crate::{Error, Result};

/// Every key accepted in a config file, in documentation order.
pub const KEYS: [&str; 20] = [
    "data",
    "tickers",
    "agent_a",
    "agent_b",
    "out",
    "tau",
    "tau_grid",
    "group",
    "iterations",
    "seed",
    "start",
    "end",
    "initial_balance",
    "cost_rate",
    "turbulence_threshold",
    "turbulence_window",
    "validation_window",
    "rebalance_window",
    "folds",
    "epsilon",
];

/// Extra key accepted alongside [`KEYS`].
pub const RISK_FREE_KEY: &str = "risk_free_rate";

/// Effective settings for one CLI run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub data: Option<PathBuf>,
    pub tickers: Vec<String>,
    pub agent_a: AgentSpec,
    pub agent_b: AgentSpec,
    pub out: PathBuf,
    pub tau_grid: Option<Vec<f64>>,
    pub backtest: BacktestConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            data: None,
            tickers: Vec::new(),
            agent_a: AgentSpec::BuyAndHold,
            agent_b: AgentSpec::Momentum {
                lookback: crate::agents::DEFAULT_MOMENTUM_LOOKBACK,
            },
            out: PathBuf::from("out"),
            tau_grid: None,
            backtest: BacktestConfig::default(),
        }
    }
}

fn normalize_key(key: &str) -> String {
    key.trim().to_ascii_lowercase().replace('-', "_")
}

fn number<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::config(key, format!("cannot parse {value:?}")))
}

fn finite(key: &str, value: &str) -> Result<f64> {
    let x: f64 = number(key, value)?;
    if !x.is_finite() {
        return Err(Error::config(key, format!("{value:?} is not a finite number")));
    }
    Ok(x)
}

/// Comma-separated τ values; each must lie in [0, 1].
pub fn parse_tau_grid(value: &str) -> Result<Vec<f64>> {
    let grid = value
        .split(',')
        .map(|s| s.trim())
        .filter(|s| !s.is_empty())
        .map(|s| {
            let tau = finite("tau_grid", s)?;
            if !(0.0..=1.0).contains(&tau) {
                return Err(Error::config("tau_grid", format!("{tau} is outside [0, 1]")));
            }
            Ok(tau)
        })
        .collect::<Result<Vec<_>>>()?;
    if grid.is_empty() {
        return Err(Error::config("tau_grid", "no values given"));
    }
    Ok(grid)
}

impl RunConfig {
    /// Applies one assignment. Values are validated as far as a single key allows.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = normalize_key(key);
        let value = value.trim();
        let bt = &mut self.backtest;
        match key.as_str() {
            "data" => self.data = Some(PathBuf::from(value)),
            "tickers" => {
                self.tickers = value
                    .split(',')
                    .map(|s| s.trim().to_string())
                    .filter(|s| !s.is_empty())
                    .collect()
            }
            "agent_a" => self.agent_a = value.parse().map_err(|e: String| Error::config("agent_a", e))?,
            "agent_b" => self.agent_b = value.parse().map_err(|e: String| Error::config("agent_b", e))?,
            "out" => self.out = PathBuf::from(value),
            "tau" => bt.tau = finite("tau", value)?,
            "tau_grid" => self.tau_grid = Some(parse_tau_grid(value)?),
            "group" => bt.classifier_group = number("group", value)?,
            "iterations" => bt.iterations = number("iterations", value)?,
            "seed" => bt.seed = number("seed", value)?,
            "start" => bt.start = Some(parse_date(value).map_err(|e| Error::config("start", e))?),
            "end" => bt.end = Some(parse_date(value).map_err(|e| Error::config("end", e))?),
            "initial_balance" => bt.initial_balance = finite("initial_balance", value)?,
            "cost_rate" => bt.cost_rate = finite("cost_rate", value)?,
            "turbulence_threshold" => {
                bt.turbulence_threshold = match value.to_ascii_lowercase().as_str() {
                    "" | "none" | "off" | "disabled" => None,
                    _ => Some(finite("turbulence_threshold", value)?),
                }
            }
            "turbulence_window" => bt.turbulence_window = number("turbulence_window", value)?,
            "validation_window" => bt.validation_window = number("validation_window", value)?,
            "rebalance_window" => bt.rebalance_window = number("rebalance_window", value)?,
            "folds" => bt.folds = number("folds", value)?,
            "epsilon" => bt.epsilon = finite("epsilon", value)?,
            RISK_FREE_KEY => bt.risk_free_rate = finite(RISK_FREE_KEY, value)?,
            _ => return Err(Error::config(key.clone(), "unknown key")),
        }
        Ok(())
    }

    /// Applies every assignment in `text`, in order.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (key, value) in parse_pairs(text)? {
            self.set(&key, &value)?;
        }
        Ok(())
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut config = Self::default();
        config.apply_text(&text)?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        self.backtest.validate()
    }
}

/// Splits config text into `(key, value)` pairs, dropping comments.
pub fn parse_pairs(text: &str) -> Result<Vec<(String, String)>> {
    let mut pairs = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::config(format!("line {}", n + 1), format!("expected key = value, got {line:?}")));
        };
        let key = normalize_key(key);
        if key.is_empty() {
            return Err(Error::config(format!("line {}", n + 1), "empty key"));
        }
        pairs.push((key, value.trim().to_string()));
    }
    Ok(pairs)
}

//! Holdings trajectories for the two agents the ensemble switches between.
//!
//! Trained policies enter as replay files (`date,ticker,shares`); two
//! deterministic baselines are built in.

use std::collections::HashMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::data::{parse_date, PricePanel};
use crate::env::{self, EnvConfig, PortfolioState, TradeAction};
use crate::{Error, Result};

/// Days between momentum rebalances.
pub const MOMENTUM_REBALANCE_DAYS: usize = 21;

pub const DEFAULT_MOMENTUM_LOOKBACK: usize = 20;

pub const REPLAY_HEADER: [&str; 3] = ["date", "ticker", "shares"];

/// One agent's daily share counts, aligned to a panel.
#[derive(Debug, Clone, PartialEq)]
pub struct HoldingsTrajectory {
    dates: Vec<NaiveDate>,
    holdings: Vec<Vec<u64>>,
    /// Cash after trading into each day's row, at zero cost.
    cash: Vec<f64>,
    agent_id: usize,
    label: String,
}

impl HoldingsTrajectory {
    /// Validates alignment with `panel` and affordability from
    /// `initial_balance`, replaying the rows through the environment at zero
    /// cost.
    pub fn new(
        panel: &PricePanel,
        holdings: Vec<Vec<u64>>,
        agent_id: usize,
        label: impl Into<String>,
        initial_balance: f64,
    ) -> Result<Self> {
        if agent_id > 1 {
            return Err(Error::Precondition(format!("agent id {agent_id} is not 0 or 1")));
        }
        if holdings.len() != panel.len() {
            let at = holdings.len().min(panel.len().saturating_sub(1));
            return Err(Error::Misaligned {
                date: panel.dates()[at],
                message: format!("{} rows for {} panel dates", holdings.len(), panel.len()),
            });
        }
        let cash = cash_ledger(panel, &holdings, initial_balance)?;
        Ok(Self {
            dates: panel.dates().to_vec(),
            holdings,
            cash,
            agent_id,
            label: label.into(),
        })
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn holdings(&self) -> &[Vec<u64>] {
        &self.holdings
    }

    pub fn row(&self, t: usize) -> &[u64] {
        &self.holdings[t]
    }

    pub fn cash(&self) -> &[f64] {
        &self.cash
    }

    pub fn agent_id(&self) -> usize {
        self.agent_id
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn len(&self) -> usize {
        self.holdings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.holdings.is_empty()
    }

    pub fn with_identity(mut self, agent_id: usize, label: impl Into<String>) -> Self {
        self.agent_id = agent_id;
        self.label = label.into();
        self
    }
}

fn cash_ledger(panel: &PricePanel, holdings: &[Vec<u64>], initial_balance: f64) -> Result<Vec<f64>> {
    let dims = panel.dims();
    let free = EnvConfig {
        cost_rate: 0.0,
        turbulence_threshold: None,
    };
    let mut state = PortfolioState::cash(panel.prices(0).to_vec(), initial_balance)?;
    let mut cash = Vec::with_capacity(holdings.len());
    for (t, row) in holdings.iter().enumerate() {
        let date = panel.dates()[t];
        if row.len() != dims {
            return Err(Error::Misaligned {
                date,
                message: format!("row has {} tickers, panel has {dims}", row.len()),
            });
        }
        let action = delta_to(state.holdings(), row);
        let next_prices = panel.prices((t + 1).min(panel.len() - 1));
        state = match env::step(&state, &action, next_prices, &free, None) {
            Ok((next, _)) => next,
            Err(Error::InfeasibleAction(_)) => {
                let shortfall = -env::settled_balance(&state, &action, 0.0);
                return Err(Error::Unaffordable { date, shortfall });
            }
            Err(e) => return Err(e),
        };
        cash.push(state.balance());
    }
    Ok(cash)
}

/// Share deltas that move `current` to `target`.
pub(crate) fn delta_to(current: &[u64], target: &[u64]) -> TradeAction {
    TradeAction::new(
        current
            .iter()
            .zip(target)
            .map(|(c, t)| *t as i64 - *c as i64)
            .collect(),
    )
}

#[derive(Debug, Deserialize)]
struct ReplayRecord {
    date: String,
    ticker: String,
    shares: i64,
}

/// Reads a `date,ticker,shares` file and aligns it to `panel`.
///
/// Every panel (date, ticker) cell must be present. Rows for dates outside
/// the panel are ignored; tickers outside the panel are rejected.
pub fn replay_trajectory(
    path: &Path,
    panel: &PricePanel,
    initial_balance: f64,
    agent_id: usize,
) -> Result<HoldingsTrajectory> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::csv(path, format!("{other:?}")),
    })?;
    let headers = reader.headers().map_err(|e| Error::csv(path, e))?.clone();
    if headers.iter().ne(REPLAY_HEADER.iter().copied()) {
        return Err(Error::csv(path, format!("expected header {}", REPLAY_HEADER.join(","))));
    }
    let column: HashMap<&str, usize> = panel
        .tickers()
        .iter()
        .enumerate()
        .map(|(i, t)| (t.as_str(), i))
        .collect();
    let mut cells: Vec<Vec<Option<u64>>> = vec![vec![None; panel.dims()]; panel.len()];
    for record in reader.deserialize::<ReplayRecord>() {
        let r = record.map_err(|e| Error::csv(path, e))?;
        let date = parse_date(&r.date).map_err(|m| Error::csv(path, m))?;
        let Some(&col) = column.get(r.ticker.as_str()) else {
            return Err(Error::csv(path, format!("ticker {} is not in the panel", r.ticker)));
        };
        let Some(t) = panel.date_index(date) else {
            continue;
        };
        if r.shares < 0 {
            return Err(Error::NegativeShares {
                date,
                ticker: r.ticker,
                shares: r.shares,
            });
        }
        if cells[t][col].replace(r.shares as u64).is_some() {
            return Err(Error::csv(path, format!("duplicate row for {} on {date}", r.ticker)));
        }
    }
    let mut holdings = Vec::with_capacity(panel.len());
    for (t, row) in cells.into_iter().enumerate() {
        let date = panel.dates()[t];
        let row = row
            .into_iter()
            .enumerate()
            .map(|(d, v)| {
                v.ok_or_else(|| Error::Misaligned {
                    date,
                    message: format!("no holdings for {}", panel.tickers()[d]),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        holdings.push(row);
    }
    let label = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "replay".into());
    HoldingsTrajectory::new(panel, holdings, agent_id, label, initial_balance)
}

/// Writes a trajectory in the replay format.
pub fn write_trajectory(path: &Path, panel: &PricePanel, traj: &HoldingsTrajectory) -> Result<()> {
    let mut writer = csv::Writer::from_path(path).map_err(|e| Error::csv(path, e))?;
    writer.write_record(REPLAY_HEADER).map_err(|e| Error::csv(path, e))?;
    for (t, row) in traj.holdings().iter().enumerate() {
        let date = traj.dates()[t].format("%Y-%m-%d").to_string();
        for (ticker, shares) in panel.tickers().iter().zip(row) {
            writer
                .write_record([date.as_str(), ticker.as_str(), &shares.to_string()])
                .map_err(|e| Error::csv(path, e))?;
        }
    }
    writer.flush().map_err(|e| Error::io(path, e))
}

/// Splits `wealth` equally across `selected` tickers, flooring to whole
/// shares, then trims buys until the zero-cost settlement from `current`
/// is non-negative.
fn equal_split(
    prices: &[f64],
    selected: &[usize],
    wealth: f64,
    current: &[u64],
    balance: f64,
) -> Vec<u64> {
    let mut target = vec![0u64; prices.len()];
    if selected.is_empty() {
        return target;
    }
    let budget = wealth / selected.len() as f64;
    for &d in selected {
        target[d] = (budget / prices[d]).floor().max(0.0) as u64;
    }
    loop {
        let action = delta_to(current, &target);
        let state = PortfolioState::new(prices.to_vec(), current.to_vec(), balance, 0);
        let Ok(state) = state else {
            return target;
        };
        if env::settled_balance(&state, &action, 0.0) >= 0.0 {
            return target;
        }
        match (0..target.len()).rev().find(|&d| target[d] > current[d]) {
            Some(d) => target[d] -= 1,
            None => return target,
        }
    }
}

/// Day 0 splits the balance equally across all tickers; holdings never change.
pub fn buy_and_hold(panel: &PricePanel, initial_balance: f64, agent_id: usize) -> Result<HoldingsTrajectory> {
    if panel.is_empty() {
        return Err(Error::Precondition("empty panel".into()));
    }
    let dims = panel.dims();
    let all: Vec<usize> = (0..dims).collect();
    let row = equal_split(panel.prices(0), &all, initial_balance, &vec![0; dims], initial_balance);
    HoldingsTrajectory::new(panel, vec![row; panel.len()], agent_id, "buy_and_hold", initial_balance)
}

/// Every `MOMENTUM_REBALANCE_DAYS` from day `lookback`, holds the top half
/// of tickers ranked by trailing `lookback`-day return, equal-split.
/// All cash before day `lookback`.
pub fn momentum_agent(
    panel: &PricePanel,
    lookback: usize,
    initial_balance: f64,
    agent_id: usize,
) -> Result<HoldingsTrajectory> {
    if lookback == 0 {
        return Err(Error::Precondition("momentum lookback must be at least 1".into()));
    }
    if lookback >= panel.len() {
        return Err(Error::Precondition(format!(
            "momentum lookback {lookback} must be shorter than the panel ({} days)",
            panel.len()
        )));
    }
    let dims = panel.dims();
    let keep = dims.div_ceil(2);
    let mut rows = Vec::with_capacity(panel.len());
    let mut current = vec![0u64; dims];
    let mut balance = initial_balance;
    for t in 0..panel.len() {
        let prices = panel.prices(t);
        if t >= lookback && (t - lookback).is_multiple_of(MOMENTUM_REBALANCE_DAYS) {
            let trailing: Vec<f64> = (0..dims)
                .map(|d| panel.close(t, d) / panel.close(t - lookback, d) - 1.0)
                .collect();
            let mut order: Vec<usize> = (0..dims).collect();
            order.sort_by(|a, b| trailing[*b].total_cmp(&trailing[*a]));
            let selected = &order[..keep];
            let wealth = env::portfolio_value(prices, &current, balance);
            let target = equal_split(prices, selected, wealth, &current, balance);
            let state = PortfolioState::new(prices.to_vec(), current.clone(), balance, 0)?;
            balance = env::settled_balance(&state, &delta_to(&current, &target), 0.0);
            current = target;
        }
        rows.push(current.clone());
    }
    HoldingsTrajectory::new(panel, rows, agent_id, format!("momentum_{lookback}"), initial_balance)
}

/// How to produce an agent's trajectory.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AgentSpec {
    Replay { path: PathBuf },
    BuyAndHold,
    Momentum { lookback: usize },
}

impl AgentSpec {
    pub fn build(&self, panel: &PricePanel, initial_balance: f64, agent_id: usize) -> Result<HoldingsTrajectory> {
        match self {
            AgentSpec::Replay { path } => replay_trajectory(path, panel, initial_balance, agent_id),
            AgentSpec::BuyAndHold => buy_and_hold(panel, initial_balance, agent_id),
            AgentSpec::Momentum { lookback } => momentum_agent(panel, *lookback, initial_balance, agent_id),
        }
    }
}

impl fmt::Display for AgentSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AgentSpec::Replay { path } => write!(f, "replay:{}", path.display()),
            AgentSpec::BuyAndHold => f.write_str("buy_and_hold"),
            AgentSpec::Momentum { lookback } => write!(f, "momentum:{lookback}"),
        }
    }
}

/// Parses `buy_and_hold`, `momentum[:LOOKBACK]` or `replay:PATH`.
impl FromStr for AgentSpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let (kind, arg) = match s.split_once(':') {
            Some((k, a)) => (k.trim(), Some(a.trim())),
            None => (s.trim(), None),
        };
        match (kind, arg) {
            ("buy_and_hold", None) => Ok(AgentSpec::BuyAndHold),
            ("momentum", None) => Ok(AgentSpec::Momentum {
                lookback: DEFAULT_MOMENTUM_LOOKBACK,
            }),
            ("momentum", Some(n)) => match n.parse::<usize>() {
                Ok(lookback) if lookback >= 1 => Ok(AgentSpec::Momentum { lookback }),
                _ => Err(format!("momentum lookback must be a positive integer, got {n:?}")),
            },
            ("replay", Some(p)) if !p.is_empty() => Ok(AgentSpec::Replay { path: p.into() }),
            _ => Err(format!(
                "unknown agent {s:?} (expected buy_and_hold, momentum[:N] or replay:PATH)"
            )),
        }
    }
}

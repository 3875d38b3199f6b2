//! Portfolio MDP: state `[prices, holdings, balance]`, integer share trades,
//! proportional transaction costs and the turbulence halt.
//!
//! Costs are charged once, through the balance, so the step reward is exactly
//! the change in portfolio value and rewards telescope over an episode.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Transaction cost as a fraction of traded notional.
pub const DEFAULT_COST_RATE: f64 = 0.001;

/// Starting cash when none is configured.
pub const DEFAULT_INITIAL_BALANCE: f64 = 1_000_000.0;

#[derive(Debug, Clone, PartialEq)]
pub struct PortfolioState {
    prices: Vec<f64>,
    holdings: Vec<u64>,
    balance: f64,
    step: usize,
}

impl PortfolioState {
    pub fn new(prices: Vec<f64>, holdings: Vec<u64>, balance: f64, step: usize) -> Result<Self> {
        if prices.len() != holdings.len() {
            return Err(Error::DimensionMismatch {
                expected: prices.len(),
                got: holdings.len(),
            });
        }
        if prices.iter().any(|p| !(*p > 0.0) || !p.is_finite()) {
            return Err(Error::InvalidState("prices must be positive".into()));
        }
        if !(balance >= 0.0) || !balance.is_finite() {
            return Err(Error::InvalidState(format!("balance {balance} is negative")));
        }
        let state = Self {
            prices,
            holdings,
            balance,
            step,
        };
        if !(state.value() > 0.0) {
            return Err(Error::InvalidState("portfolio value must be positive".into()));
        }
        Ok(state)
    }

    /// All-cash starting state.
    pub fn cash(prices: Vec<f64>, balance: f64) -> Result<Self> {
        let dims = prices.len();
        Self::new(prices, vec![0; dims], balance, 0)
    }

    pub fn prices(&self) -> &[f64] {
        &self.prices
    }

    pub fn holdings(&self) -> &[u64] {
        &self.holdings
    }

    pub fn balance(&self) -> f64 {
        self.balance
    }

    pub fn step_index(&self) -> usize {
        self.step
    }

    pub fn dims(&self) -> usize {
        self.prices.len()
    }

    /// Total portfolio value `b + pᵀh`.
    pub fn value(&self) -> f64 {
        portfolio_value(&self.prices, &self.holdings, self.balance)
    }
}

pub fn portfolio_value(prices: &[f64], holdings: &[u64], balance: f64) -> f64 {
    balance
        + prices
            .iter()
            .zip(holdings)
            .map(|(p, h)| p * *h as f64)
            .sum::<f64>()
}

/// Share deltas per ticker: negative sells, positive buys.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TradeAction {
    pub deltas: Vec<i64>,
}

impl TradeAction {
    pub fn new(deltas: Vec<i64>) -> Self {
        Self { deltas }
    }

    pub fn hold(dims: usize) -> Self {
        Self { deltas: vec![0; dims] }
    }

    pub fn is_hold(&self) -> bool {
        self.deltas.iter().all(|d| *d == 0)
    }

    /// Sells every held share.
    pub fn liquidate(holdings: &[u64]) -> Self {
        Self {
            deltas: holdings.iter().map(|h| -(*h as i64)).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvConfig {
    pub cost_rate: f64,
    /// `None` disables the halt.
    pub turbulence_threshold: Option<f64>,
}

impl Default for EnvConfig {
    fn default() -> Self {
        Self {
            cost_rate: DEFAULT_COST_RATE,
            turbulence_threshold: None,
        }
    }
}

impl EnvConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.cost_rate) {
            return Err(Error::config("cost_rate", "must be in [0, 1)"));
        }
        if let Some(t) = self.turbulence_threshold {
            if !(t >= 0.0) {
                return Err(Error::config("turbulence_threshold", "must be non-negative"));
            }
        }
        Ok(())
    }

    pub fn halts(&self, turbulence: Option<f64>) -> bool {
        matches!((self.turbulence_threshold, turbulence), (Some(limit), Some(v)) if v > limit)
    }
}

/// Transaction cost `c_t = rate · Σ p[d]·|a[d]|`.
pub fn transaction_cost(prices: &[f64], action: &TradeAction, cost_rate: f64) -> f64 {
    cost_rate
        * prices
            .iter()
            .zip(&action.deltas)
            .map(|(p, a)| p * a.unsigned_abs() as f64)
            .sum::<f64>()
}

/// Balance `state` would hold after executing `action` at its current
/// prices, costs included. Negative means the action is unaffordable.
pub fn settled_balance(state: &PortfolioState, action: &TradeAction, cost_rate: f64) -> f64 {
    settle_balance(state.balance(), state.prices(), action, cost_rate)
}

fn settle_balance(balance: f64, prices: &[f64], action: &TradeAction, cost_rate: f64) -> f64 {
    let mut bought = 0.0;
    let mut sold = 0.0;
    for (p, a) in prices.iter().zip(&action.deltas) {
        let notional = p * a.unsigned_abs() as f64;
        if *a > 0 {
            bought += notional;
        } else {
            sold += notional;
        }
    }
    balance - bought + sold - transaction_cost(prices, action, cost_rate)
}

/// Makes `raw` feasible: sells are capped at held shares, then buys are
/// admitted in ticker order, each floored to what the remaining cash
/// (including sale proceeds, net of all costs) can pay for.
pub fn clip_action(state: &PortfolioState, raw: &TradeAction, cost_rate: f64) -> TradeAction {
    let prices = state.prices();
    let mut deltas: Vec<i64> = raw
        .deltas
        .iter()
        .zip(state.holdings())
        .map(|(a, h)| if *a < 0 { (*a).max(-(*h as i64)) } else { *a })
        .collect();

    let mut cash = state.balance();
    for (p, a) in prices.iter().zip(&deltas) {
        if *a < 0 {
            cash += p * (-a) as f64 * (1.0 - cost_rate);
        }
    }
    for (d, p) in prices.iter().enumerate() {
        if deltas[d] <= 0 {
            continue;
        }
        let unit = p * (1.0 + cost_rate);
        let affordable = (cash.max(0.0) / unit).floor();
        let shares = (deltas[d] as f64).min(affordable) as i64;
        deltas[d] = shares;
        cash -= shares as f64 * unit;
    }

    // Rounding in the running cash can leave the exact settlement a hair
    // negative; trim the last admitted buy until it is not.
    let mut action = TradeAction::new(deltas);
    while settle_balance(state.balance(), prices, &action, cost_rate) < 0.0 {
        match action.deltas.iter().rposition(|a| *a > 0) {
            Some(d) => action.deltas[d] -= 1,
            None => break,
        }
    }
    action
}

/// Executes `action` at the current prices, then moves prices to
/// `next_prices`. Returns the new state and the reward `P(s') - P(s)`.
///
/// When `turbulence` exceeds the configured threshold the requested action
/// is replaced with a full liquidation.
pub fn step(
    state: &PortfolioState,
    action: &TradeAction,
    next_prices: &[f64],
    config: &EnvConfig,
    turbulence: Option<f64>,
) -> Result<(PortfolioState, f64)> {
    let dims = state.dims();
    if action.deltas.len() != dims {
        return Err(Error::DimensionMismatch {
            expected: dims,
            got: action.deltas.len(),
        });
    }
    if next_prices.len() != dims {
        return Err(Error::DimensionMismatch {
            expected: dims,
            got: next_prices.len(),
        });
    }
    if next_prices.iter().any(|p| !(*p > 0.0)) {
        return Err(Error::InvalidState("next prices must be positive".into()));
    }

    let liquidation;
    let action = if config.halts(turbulence) {
        liquidation = TradeAction::liquidate(state.holdings());
        &liquidation
    } else {
        action
    };

    let mut holdings = Vec::with_capacity(dims);
    for (d, (h, a)) in state.holdings().iter().zip(&action.deltas).enumerate() {
        let next = *h as i64 + a;
        if next < 0 {
            return Err(Error::InfeasibleAction(format!(
                "sells {} shares of ticker {d} but holds {h}",
                -a
            )));
        }
        holdings.push(next as u64);
    }
    let balance = settle_balance(state.balance(), state.prices(), action, config.cost_rate);
    if balance < 0.0 {
        return Err(Error::InfeasibleAction(format!(
            "balance would be {balance}"
        )));
    }

    let next = PortfolioState {
        prices: next_prices.to_vec(),
        holdings,
        balance,
        step: state.step + 1,
    };
    let reward = next.value() - state.value();
    Ok((next, reward))
}

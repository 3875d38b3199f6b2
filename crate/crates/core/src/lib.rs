//! Backtesting engine for a variance-gated classifier ensemble that switches
//! between the stock holdings of two trading agents.
//!
//! The pipeline, bottom up:
//!
//! - [`data`]: CSV loading, date alignment, simple returns and the turbulence index.
//! - [`env`]: the portfolio MDP (state, feasibility clipping, costs, turbulence halt).
//! - [`agents`]: holdings trajectories, either replayed from files or from built-in baselines.
//! - [`classifiers`]: SVM, decision tree and logistic regression trained to tell the agents apart.
//! - [`ensemble`]: candidate matrix, holdings dispersion, threshold-gated picks and voting.
//! - [`metrics`]: cumulative return, max drawdown, Sharpe and Calmar.
//! - [`backtest`]: the experiment harness, report files and threshold sweeps.
//! - [`config`] and [`synth`]: plumbing for the `ensemble-bt` command-line tool.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod agents;
pub mod backtest;
pub mod classifiers;
pub mod config;
pub mod data;
pub mod ensemble;
pub mod env;
mod error;
pub mod metrics;
pub mod synth;

pub use error::{Error, Result};

/// Number of agents the ensemble switches between.
pub const AGENT_COUNT: usize = 2;

/// Trading days per year used for annualization.
pub const TRADING_DAYS_PER_YEAR: f64 = 252.0;

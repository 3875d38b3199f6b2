//! Cumulative return, maximum drawdown, Sharpe and Calmar ratios.
//!
//! Conventions: cumulative return is `P_last / P_first - 1`; drawdown is a
//! positive fraction; Sharpe uses the sample std of daily excess returns
//! scaled by √252; Calmar divides the 252-day compounded annual return, less
//! the risk-free rate, by the drawdown.

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::{Error, Result, TRADING_DAYS_PER_YEAR};

/// Daily portfolio values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquitySeries {
    pub dates: Vec<NaiveDate>,
    pub values: Vec<f64>,
}

impl EquitySeries {
    pub fn new(dates: Vec<NaiveDate>, values: Vec<f64>) -> Result<Self> {
        if dates.len() != values.len() {
            return Err(Error::DimensionMismatch {
                expected: dates.len(),
                got: values.len(),
            });
        }
        Ok(Self { dates, values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn daily_returns(&self) -> Vec<f64> {
        simple_returns(&self.values)
    }
}

pub fn simple_returns(values: &[f64]) -> Vec<f64> {
    values.windows(2).map(|w| w[1] / w[0] - 1.0).collect()
}

fn check_series(values: &[f64]) -> Result<()> {
    if values.len() < 2 {
        return Err(Error::SeriesTooShort {
            needed: 2,
            got: values.len(),
        });
    }
    match values.iter().find(|v| !(**v > 0.0) || !v.is_finite()) {
        Some(v) => Err(Error::NonPositiveValue(*v)),
        None => Ok(()),
    }
}

pub fn cumulative_return(values: &[f64]) -> Result<f64> {
    check_series(values)?;
    Ok(values[values.len() - 1] / values[0] - 1.0)
}

/// Largest `1 - P_j / P_i` over `i < j`, in one pass over running peaks.
pub fn max_drawdown(values: &[f64]) -> Result<f64> {
    check_series(values)?;
    let mut peak = values[0];
    let mut worst = 0.0_f64;
    for &v in &values[1..] {
        if v > peak {
            peak = v;
        } else {
            worst = worst.max(1.0 - v / peak);
        }
    }
    Ok(worst)
}

/// Annualized Sharpe ratio of daily returns against an annual risk-free rate.
pub fn sharpe_ratio(daily_returns: &[f64], risk_free_annual: f64) -> Result<f64> {
    if daily_returns.len() < 2 {
        return Err(Error::SeriesTooShort {
            needed: 2,
            got: daily_returns.len(),
        });
    }
    let daily_rf = risk_free_annual / TRADING_DAYS_PER_YEAR;
    let n = daily_returns.len() as f64;
    let excess: Vec<f64> = daily_returns.iter().map(|r| r - daily_rf).collect();
    let mean = excess.iter().sum::<f64>() / n;
    let var = excess.iter().map(|e| (e - mean) * (e - mean)).sum::<f64>() / (n - 1.0);
    let std = var.sqrt();
    // relative cutoff: float noise in a constant series is not dispersion
    if !(std > 1e-14 * mean.abs().max(f64::MIN_POSITIVE)) || std == 0.0 {
        return Err(Error::UndefinedSharpe);
    }
    Ok(mean / std * TRADING_DAYS_PER_YEAR.sqrt())
}

/// `(P_last / P_first)^(252 / n) - 1` with `n` the number of daily steps.
pub fn annualized_return(values: &[f64]) -> Result<f64> {
    check_series(values)?;
    let periods = (values.len() - 1) as f64;
    Ok((values[values.len() - 1] / values[0]).powf(TRADING_DAYS_PER_YEAR / periods) - 1.0)
}

pub fn calmar_ratio(values: &[f64], risk_free_annual: f64) -> Result<f64> {
    let mdd = max_drawdown(values)?;
    if mdd <= 0.0 {
        return Err(Error::UndefinedCalmar);
    }
    Ok((annualized_return(values)? - risk_free_annual) / mdd)
}

/// The four metrics for one equity curve. Sharpe and Calmar are `None`
/// where undefined (flat or never-declining curves).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub cumulative_return: f64,
    pub max_drawdown: f64,
    pub sharpe: Option<f64>,
    pub calmar: Option<f64>,
    pub risk_free_rate: f64,
}

impl MetricReport {
    pub fn compute(values: &[f64], risk_free_annual: f64) -> Result<Self> {
        let cumulative_return = cumulative_return(values)?;
        let max_drawdown = max_drawdown(values)?;
        let sharpe = match sharpe_ratio(&simple_returns(values), risk_free_annual) {
            Ok(s) => Some(s),
            Err(Error::UndefinedSharpe | Error::SeriesTooShort { .. }) => None,
            Err(e) => return Err(e),
        };
        let calmar = match calmar_ratio(values, risk_free_annual) {
            Ok(c) => Some(c),
            Err(Error::UndefinedCalmar) => None,
            Err(e) => return Err(e),
        };
        Ok(Self {
            cumulative_return,
            max_drawdown,
            sharpe,
            calmar,
            risk_free_rate: risk_free_annual,
        })
    }

    /// Arithmetic mean of each metric. An optional metric undefined in any
    /// report is undefined in the mean.
    pub fn mean(reports: &[MetricReport]) -> Result<Self> {
        let Some(first) = reports.first() else {
            return Err(Error::Precondition("no reports to average".into()));
        };
        let n = reports.len() as f64;
        let avg = |f: fn(&MetricReport) -> f64| reports.iter().map(f).sum::<f64>() / n;
        let avg_opt = |f: fn(&MetricReport) -> Option<f64>| {
            reports
                .iter()
                .map(f)
                .collect::<Option<Vec<f64>>>()
                .map(|v| v.iter().sum::<f64>() / n)
        };
        Ok(Self {
            cumulative_return: avg(|r| r.cumulative_return),
            max_drawdown: avg(|r| r.max_drawdown),
            sharpe: avg_opt(|r| r.sharpe),
            calmar: avg_opt(|r| r.calmar),
            risk_free_rate: first.risk_free_rate,
        })
    }

    /// Drawdown with the sign used in published result tables.
    pub fn max_drawdown_negated(&self) -> f64 {
        -self.max_drawdown
    }
}

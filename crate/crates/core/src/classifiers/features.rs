//! Holdings-derived features: portfolio weights `p[d]·h[d] / P` followed by
//! the one-day share change `h_t[d] - h_{t-1}[d]`.

use super::FeatureMatrix;
use crate::agents::HoldingsTrajectory;
use crate::data::PricePanel;
use crate::env::portfolio_value;
use crate::{Error, Result};

/// Feature row for `traj` on day `t`; length `2·D`.
pub fn agent_features(panel: &PricePanel, traj: &HoldingsTrajectory, t: usize) -> Vec<f64> {
    let prices = panel.prices(t);
    let row = traj.row(t);
    let value = portfolio_value(prices, row, traj.cash()[t]);
    let mut out = Vec::with_capacity(2 * row.len());
    out.extend(prices.iter().zip(row).map(|(p, h)| p * *h as f64 / value));
    match t.checked_sub(1) {
        Some(prev) => out.extend(
            row.iter()
                .zip(traj.row(prev))
                .map(|(h, before)| *h as f64 - *before as f64),
        ),
        None => out.extend(row.iter().map(|h| *h as f64)),
    }
    out
}

/// Both agents' feature rows for days `days`, labelled by agent id
/// (agent 0's rows first).
pub fn window_dataset(
    panel: &PricePanel,
    agents: [&HoldingsTrajectory; 2],
    days: std::ops::Range<usize>,
) -> Result<(FeatureMatrix, Vec<usize>)> {
    if days.end > panel.len() || days.is_empty() {
        return Err(Error::InsufficientHistory {
            needed: days.end,
            available: panel.len(),
        });
    }
    let mut rows = Vec::with_capacity(2 * days.len());
    let mut labels = Vec::with_capacity(2 * days.len());
    for (label, traj) in agents.iter().enumerate() {
        for t in days.clone() {
            rows.push(agent_features(panel, traj, t));
            labels.push(label);
        }
    }
    Ok((FeatureMatrix::from_rows(rows)?, labels))
}

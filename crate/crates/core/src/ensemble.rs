//! The decision block: from per-classifier probabilities and the two
//! agents' current holdings to a single chosen holdings row.
//!
//! 1. Candidate matrix `Q` (`C × 2`): classifier `i`'s probability that
//!    agent `j`'s holdings belong to agent `j`.
//! 2. Dispersion `σ̄`: per-ticker std of the two holdings rows, min-max
//!    normalized, averaged.
//! 3. Each classifier picks the agent with the highest `Q` when `σ̄ < τ`,
//!    the lowest otherwise.
//! 4. Majority vote; ties go to the higher column mean of `Q`, then agent 0.

use chrono::NaiveDate;
use serde::Serialize;

use crate::classifiers::ProbabilityMatrix;
use crate::{Error, Result, AGENT_COUNT};

pub const DEFAULT_EPSILON: f64 = 1e-8;

/// `C × 2` classifier confidences in each holdings row's true agent.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CandidateMatrix {
    rows: Vec<[f64; 2]>,
}

impl CandidateMatrix {
    pub fn new(rows: Vec<[f64; 2]>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::Precondition("candidate matrix needs at least one classifier".into()));
        }
        if rows.iter().flatten().any(|q| !(0.0..=1.0).contains(q)) {
            return Err(Error::Precondition("candidate entries must lie in [0, 1]".into()));
        }
        Ok(Self { rows })
    }

    pub fn rows(&self) -> &[[f64; 2]] {
        &self.rows
    }

    pub fn classifiers(&self) -> usize {
        self.rows.len()
    }

    pub fn column_means(&self) -> [f64; 2] {
        let c = self.rows.len() as f64;
        let mut sums = [0.0; 2];
        for row in &self.rows {
            sums[0] += row[0];
            sums[1] += row[1];
        }
        [sums[0] / c, sums[1] / c]
    }
}

/// `Q[i][j] = P_i[j][k_j]`: row `j` of each probability matrix is agent
/// `j`'s holdings sample, `true_labels[j]` its agent.
pub fn build_candidate_matrix(
    probabilities: &[ProbabilityMatrix],
    true_labels: [usize; 2],
) -> Result<CandidateMatrix> {
    if true_labels.iter().any(|k| *k >= AGENT_COUNT) {
        return Err(Error::Precondition(format!("true labels {true_labels:?} out of range")));
    }
    let rows = probabilities
        .iter()
        .map(|p| {
            if p.len() != AGENT_COUNT {
                return Err(Error::DimensionMismatch {
                    expected: AGENT_COUNT,
                    got: p.len(),
                });
            }
            Ok([p.get(0, true_labels[0]), p.get(1, true_labels[1])])
        })
        .collect::<Result<Vec<_>>>()?;
    CandidateMatrix::new(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DispersionStats {
    pub per_dim_mean: Vec<f64>,
    pub per_dim_std: Vec<f64>,
    pub normalized: Vec<f64>,
    pub mean_normalized: f64,
    pub epsilon: f64,
}

/// Holdings dispersion of the two agents.
///
/// With two rows the population std per ticker reduces to `|a - b| / 2`.
/// For a single ticker min and max coincide, so `σ̄` is always 0.
pub fn dispersion(holdings: [&[u64]; 2], epsilon: f64) -> Result<DispersionStats> {
    let [a, b] = holdings;
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            got: b.len(),
        });
    }
    if a.is_empty() {
        return Err(Error::Precondition("dispersion needs at least one ticker".into()));
    }
    let per_dim_mean: Vec<f64> = a.iter().zip(b).map(|(x, y)| (*x as f64 + *y as f64) / 2.0).collect();
    let per_dim_std: Vec<f64> = a.iter().zip(b).map(|(x, y)| x.abs_diff(*y) as f64 / 2.0).collect();
    let min = per_dim_std.iter().copied().fold(f64::INFINITY, f64::min);
    let max = per_dim_std.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = max - min + epsilon;
    let normalized: Vec<f64> = per_dim_std.iter().map(|s| (s - min) / span).collect();
    let mean_normalized = normalized.iter().sum::<f64>() / normalized.len() as f64;
    Ok(DispersionStats {
        per_dim_mean,
        per_dim_std,
        normalized,
        mean_normalized,
        epsilon,
    })
}

/// Per-classifier agent picks: argmax of the row when `σ̄ < τ`, argmin
/// otherwise. Ties go to agent 0.
pub fn select_per_classifier(q: &CandidateMatrix, sigma_bar: f64, tau: f64) -> Vec<usize> {
    let low_variance = sigma_bar < tau;
    q.rows()
        .iter()
        .map(|row| {
            if low_variance {
                usize::from(row[1] > row[0])
            } else {
                usize::from(row[1] < row[0])
            }
        })
        .collect()
}

/// Vote counts and the winning agent.
pub fn vote(picks: &[usize], q: &CandidateMatrix) -> ([usize; 2], usize) {
    let mut votes = [0usize; 2];
    for &p in picks {
        votes[p] += 1;
    }
    let winner = match votes[0].cmp(&votes[1]) {
        std::cmp::Ordering::Greater => 0,
        std::cmp::Ordering::Less => 1,
        std::cmp::Ordering::Equal => {
            let means = q.column_means();
            usize::from(means[1] > means[0])
        }
    };
    (votes, winner)
}

/// Share deltas `target - current`.
pub fn ours_action(current: &[u64], target: &[u64]) -> Result<Vec<i64>> {
    if current.len() != target.len() {
        return Err(Error::DimensionMismatch {
            expected: current.len(),
            got: target.len(),
        });
    }
    Ok(current
        .iter()
        .zip(target)
        .map(|(c, t)| *t as i64 - *c as i64)
        .collect())
}

/// One day's audit row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecisionRecord {
    pub date: NaiveDate,
    pub sigma_bar: f64,
    pub tau: f64,
    pub picks: Vec<usize>,
    pub votes: [usize; 2],
    pub final_agent: usize,
    pub final_holdings: Vec<u64>,
    pub ours_action: Vec<i64>,
    pub candidates: CandidateMatrix,
}

#[derive(Debug, Clone, Copy)]
pub struct DecisionInput<'a> {
    pub date: NaiveDate,
    /// Rows `[agent 0, agent 1]` of `H_t`.
    pub holdings: [&'a [u64]; 2],
    pub probabilities: &'a [ProbabilityMatrix],
    pub true_labels: [usize; 2],
    pub tau: f64,
    pub current_holdings: &'a [u64],
    pub epsilon: f64,
}

/// Runs the full decision block for one day.
pub fn decide(input: DecisionInput<'_>) -> Result<DecisionRecord> {
    if !(0.0..=1.0).contains(&input.tau) {
        return Err(Error::config("tau", format!("{} is outside [0, 1]", input.tau)));
    }
    let q = build_candidate_matrix(input.probabilities, input.true_labels)?;
    let stats = dispersion(input.holdings, input.epsilon)?;
    let picks = select_per_classifier(&q, stats.mean_normalized, input.tau);
    let (votes, final_agent) = vote(&picks, &q);
    let final_holdings = input.holdings[final_agent].to_vec();
    let ours_action = ours_action(input.current_holdings, &final_holdings)?;
    Ok(DecisionRecord {
        date: input.date,
        sigma_bar: stats.mean_normalized,
        tau: input.tau,
        picks,
        votes,
        final_agent,
        final_holdings,
        ours_action,
        candidates: q,
    })
}

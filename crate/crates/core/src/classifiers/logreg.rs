//! Binary logistic regression with an elastic-net penalty, fitted by
//! accelerated proximal gradient (FISTA).
//!
//! Objective, with `λ = 1 / (c·n)` and `ρ = l1_ratio`:
//!
//! ```text
//! (1/n) Σ log(1 + exp(-yᵢ(w·xᵢ + b))) + λ(ρ‖w‖₁ + (1-ρ)/2 ‖w‖²)
//! ```
//!
//! Labels are mapped to ±1 and every update is an odd function of `y`, so
//! swapping the class labels yields exactly the negated parameters.

use super::{sigmoid, FeatureMatrix};

pub const MAX_ITERATIONS: usize = 10_000;

/// Stop once the proximal gradient mapping (the plain gradient when
/// `l1_ratio = 0`) is shorter than this.
pub const TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct LogRegModel {
    pub weights: Vec<f64>,
    pub intercept: f64,
    pub iterations: usize,
}

impl LogRegModel {
    pub fn fit(x: &FeatureMatrix, labels: &[usize], c: f64, l1_ratio: f64) -> Self {
        let n = x.rows();
        let f = x.cols();
        let nf = n as f64;
        let y: Vec<f64> = labels.iter().map(|&l| if l == 1 { 1.0 } else { -1.0 }).collect();
        let lambda = 1.0 / (c * nf);
        let l1 = lambda * l1_ratio;
        let l2 = lambda * (1.0 - l1_ratio);

        let frob: f64 = x.iter_rows().map(|r| r.iter().map(|v| v * v).sum::<f64>() + 1.0).sum();
        let lipschitz = frob / (4.0 * nf) + l2;
        let step = 1.0 / lipschitz;

        // theta = [w..., b]
        let mut theta = vec![0.0; f + 1];
        let mut probe = theta.clone();
        let mut grad = vec![0.0; f + 1];
        let mut momentum = 1.0_f64;
        let mut iterations = 0;

        while iterations < MAX_ITERATIONS {
            iterations += 1;
            gradient(x, &y, &probe, l2, &mut grad);

            let mut next = vec![0.0; f + 1];
            let mut mapping = 0.0;
            for j in 0..=f {
                let moved = probe[j] - step * grad[j];
                next[j] = if j < f { soft_threshold(moved, step * l1) } else { moved };
                let g = (probe[j] - next[j]) / step;
                mapping += g * g;
            }

            let momentum_next = (1.0 + (1.0 + 4.0 * momentum * momentum).sqrt()) / 2.0;
            let beta = (momentum - 1.0) / momentum_next;
            for j in 0..=f {
                probe[j] = next[j] + beta * (next[j] - theta[j]);
            }
            theta = next;
            momentum = momentum_next;

            if mapping.sqrt() < TOLERANCE {
                break;
            }
        }

        let intercept = theta.pop().unwrap_or(0.0);
        Self {
            weights: theta,
            intercept,
            iterations,
        }
    }

    pub fn n_features(&self) -> usize {
        self.weights.len()
    }

    pub fn decision(&self, x: &[f64]) -> f64 {
        self.weights.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + self.intercept
    }

    pub fn predict_proba_row(&self, x: &[f64]) -> [f64; 2] {
        let z = self.decision(x);
        [sigmoid(-z), sigmoid(z)]
    }
}

fn gradient(x: &FeatureMatrix, y: &[f64], theta: &[f64], l2: f64, out: &mut [f64]) {
    let f = x.cols();
    let n = x.rows() as f64;
    out.iter_mut().for_each(|g| *g = 0.0);
    for (row, yi) in x.iter_rows().zip(y) {
        let z = row.iter().zip(theta).map(|(v, w)| v * w).sum::<f64>() + theta[f];
        let coef = -yi * sigmoid(-yi * z) / n;
        for (g, v) in out.iter_mut().zip(row) {
            *g += coef * v;
        }
        out[f] += coef;
    }
    for j in 0..f {
        out[j] += l2 * theta[j];
    }
}

fn soft_threshold(v: f64, t: f64) -> f64 {
    if v > t {
        v - t
    } else if v < -t {
        v + t
    } else {
        0.0
    }
}

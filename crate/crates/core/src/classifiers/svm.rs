//! C-SVM solved in the dual by sequential minimal optimization, with
//! second-order working-set selection, and sigmoid (Platt) calibration of
//! the decision values.
//!
//! Internally the class of the first training row is always the positive
//! class. Relabelling the data therefore produces the same dual problem, and
//! the fitted probabilities swap columns exactly.

use super::{FeatureMatrix, Kernel, POLY_DEGREE};
use crate::Result;

/// SMO stops once no pair violates the KKT conditions by more than this.
pub const KKT_TOLERANCE: f64 = 1e-3;

const TAU: f64 = 1e-12;
const MAX_SMO_ITERATIONS: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
struct KernelFn {
    kernel: Kernel,
    gamma: f64,
}

impl KernelFn {
    fn eval(&self, a: &[f64], b: &[f64]) -> f64 {
        let dot = || a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
        match self.kernel {
            Kernel::Linear => dot(),
            Kernel::Rbf => {
                let sq: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
                (-self.gamma * sq).exp()
            }
            Kernel::Poly => (self.gamma * dot() + 1.0).powi(POLY_DEGREE),
            Kernel::Sigmoid => (self.gamma * dot()).tanh(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SvmModel {
    kernel: KernelFn,
    support: FeatureMatrix,
    /// `yᵢ αᵢ` per support vector.
    coef: Vec<f64>,
    rho: f64,
    /// Platt parameters: `P(positive | f) = 1 / (1 + exp(A f + B))`.
    platt_a: f64,
    platt_b: f64,
    positive_class: usize,
    n_features: usize,
}

impl SvmModel {
    pub fn fit(x: &FeatureMatrix, labels: &[usize], kernel: Kernel, c: f64, width: Option<f64>) -> Result<Self> {
        let n = x.rows();
        let f = x.cols();
        let gamma = match kernel {
            Kernel::Rbf => {
                let w = width.unwrap_or(1.0);
                1.0 / (2.0 * w * w)
            }
            _ => 1.0 / f as f64,
        };
        let kfn = KernelFn { kernel, gamma };
        let positive_class = labels[0];
        let y: Vec<f64> = labels
            .iter()
            .map(|&l| if l == positive_class { 1.0 } else { -1.0 })
            .collect();

        let mut gram = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let k = kfn.eval(x.row(i), x.row(j));
                gram[i * n + j] = k;
                gram[j * n + i] = k;
            }
        }

        let alpha = smo(&gram, &y, c);
        let rho = compute_rho(&gram, &y, &alpha, c);

        let decision: Vec<f64> = (0..n)
            .map(|i| {
                (0..n)
                    .filter(|&j| alpha[j] > 0.0)
                    .map(|j| y[j] * alpha[j] * gram[j * n + i])
                    .sum::<f64>()
                    - rho
            })
            .collect();
        let (platt_a, platt_b) = fit_platt(&decision, &y);

        let sv: Vec<usize> = (0..n).filter(|&i| alpha[i] > 0.0).collect();
        Ok(Self {
            kernel: kfn,
            support: x.select(&sv),
            coef: sv.iter().map(|&i| y[i] * alpha[i]).collect(),
            rho,
            platt_a,
            platt_b,
            positive_class,
            n_features: f,
        })
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn n_support(&self) -> usize {
        self.coef.len()
    }

    fn internal_decision(&self, x: &[f64]) -> f64 {
        self.support
            .iter_rows()
            .zip(&self.coef)
            .map(|(sv, c)| c * self.kernel.eval(sv, x))
            .sum::<f64>()
            - self.rho
    }

    /// Signed margin; positive favours class 1.
    pub fn decision_value(&self, x: &[f64]) -> f64 {
        let f = self.internal_decision(x);
        if self.positive_class == 1 {
            f
        } else {
            -f
        }
    }

    pub fn predict_proba_row(&self, x: &[f64]) -> [f64; 2] {
        let p = platt_probability(self.internal_decision(x), self.platt_a, self.platt_b);
        let mut out = [0.0; 2];
        out[self.positive_class] = p;
        out[1 - self.positive_class] = 1.0 - p;
        out
    }
}

/// Returns the dual variables α.
fn smo(gram: &[f64], y: &[f64], c: f64) -> Vec<f64> {
    let n = y.len();
    let q = |i: usize, j: usize| y[i] * y[j] * gram[i * n + j];
    let mut alpha = vec![0.0; n];
    let mut grad = vec![-1.0; n];

    for _ in 0..MAX_SMO_ITERATIONS {
        let Some((i, j)) = select_working_set(gram, y, &alpha, &grad, c) else {
            break;
        };
        let (old_i, old_j) = (alpha[i], alpha[j]);
        let kii = gram[i * n + i];
        let kjj = gram[j * n + j];
        if y[i] != y[j] {
            let quad = positive(kii + kjj + 2.0 * q(i, j));
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if diff > 0.0 {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if alpha[j] > c {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            let quad = positive(kii + kjj - 2.0 * q(i, j));
            let delta = (grad[i] - grad[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > c {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else if alpha[j] < 0.0 {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if sum > c {
                if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }
        let (di, dj) = (alpha[i] - old_i, alpha[j] - old_j);
        for (k, g) in grad.iter_mut().enumerate() {
            *g += q(i, k) * di + q(j, k) * dj;
        }
    }
    alpha
}

fn positive(quad: f64) -> f64 {
    if quad > 0.0 {
        quad
    } else {
        TAU
    }
}

/// Maximal violating `i`, then the `j` with the best second-order gain.
/// `None` once the KKT gap is below tolerance.
fn select_working_set(gram: &[f64], y: &[f64], alpha: &[f64], grad: &[f64], c: f64) -> Option<(usize, usize)> {
    let n = y.len();
    let mut gmax = f64::NEG_INFINITY;
    let mut best_i = None;
    for t in 0..n {
        let in_up = if y[t] > 0.0 { alpha[t] < c } else { alpha[t] > 0.0 };
        if in_up && -y[t] * grad[t] >= gmax {
            gmax = -y[t] * grad[t];
            best_i = Some(t);
        }
    }
    let i = best_i?;
    let kii = gram[i * n + i];

    let mut gmax2 = f64::NEG_INFINITY;
    let mut best_j = None;
    let mut best_obj = f64::INFINITY;
    for t in 0..n {
        let in_low = if y[t] > 0.0 { alpha[t] > 0.0 } else { alpha[t] < c };
        if !in_low {
            continue;
        }
        let yg = y[t] * grad[t];
        gmax2 = gmax2.max(yg);
        let grad_diff = gmax + yg;
        if grad_diff > 0.0 {
            let quad = positive(kii + gram[t * n + t] - 2.0 * gram[i * n + t]);
            let obj = -(grad_diff * grad_diff) / quad;
            if obj <= best_obj {
                best_obj = obj;
                best_j = Some(t);
            }
        }
    }
    if gmax + gmax2 < KKT_TOLERANCE {
        return None;
    }
    best_j.map(|j| (i, j))
}

fn compute_rho(gram: &[f64], y: &[f64], alpha: &[f64], c: f64) -> f64 {
    let n = y.len();
    let mut upper = f64::INFINITY;
    let mut lower = f64::NEG_INFINITY;
    let mut free_sum = 0.0;
    let mut free = 0usize;
    for i in 0..n {
        // gradient of the dual objective at the solution
        let g = (0..n)
            .map(|j| y[i] * y[j] * gram[i * n + j] * alpha[j])
            .sum::<f64>()
            - 1.0;
        let yg = y[i] * g;
        if alpha[i] >= c {
            if y[i] < 0.0 {
                upper = upper.min(yg);
            } else {
                lower = lower.max(yg);
            }
        } else if alpha[i] <= 0.0 {
            if y[i] > 0.0 {
                upper = upper.min(yg);
            } else {
                lower = lower.max(yg);
            }
        } else {
            free += 1;
            free_sum += yg;
        }
    }
    if free > 0 {
        free_sum / free as f64
    } else {
        (upper + lower) / 2.0
    }
}

fn platt_probability(f: f64, a: f64, b: f64) -> f64 {
    let fab = f * a + b;
    if fab >= 0.0 {
        let e = (-fab).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + fab.exp())
    }
}

/// Newton's method with backtracking on the regularized-target
/// cross-entropy (Lin, Lin & Weng's formulation of Platt scaling).
fn fit_platt(decision: &[f64], y: &[f64]) -> (f64, f64) {
    let positives = y.iter().filter(|v| **v > 0.0).count() as f64;
    let negatives = y.len() as f64 - positives;
    let hi = (positives + 1.0) / (positives + 2.0);
    let lo = 1.0 / (negatives + 2.0);
    let targets: Vec<f64> = y.iter().map(|v| if *v > 0.0 { hi } else { lo }).collect();

    let objective = |a: f64, b: f64| -> f64 {
        decision
            .iter()
            .zip(&targets)
            .map(|(f, t)| {
                let fab = f * a + b;
                if fab >= 0.0 {
                    t * fab + (-fab).exp().ln_1p()
                } else {
                    (t - 1.0) * fab + fab.exp().ln_1p()
                }
            })
            .sum()
    };

    let mut a = 0.0;
    let mut b = ((negatives + 1.0) / (positives + 1.0)).ln();
    let mut fval = objective(a, b);
    for _ in 0..100 {
        let (mut h11, mut h22, mut h21, mut g1, mut g2) = (1e-12, 1e-12, 0.0, 0.0, 0.0);
        for (f, t) in decision.iter().zip(&targets) {
            let p = platt_probability(*f, a, b);
            let q = 1.0 - p;
            let d2 = p * q;
            h11 += f * f * d2;
            h22 += d2;
            h21 += f * d2;
            let d1 = t - p;
            g1 += f * d1;
            g2 += d1;
        }
        if g1.abs() < 1e-5 && g2.abs() < 1e-5 {
            break;
        }
        let det = h11 * h22 - h21 * h21;
        let da = -(h22 * g1 - h21 * g2) / det;
        let db = -(-h21 * g1 + h11 * g2) / det;
        let gd = g1 * da + g2 * db;
        let mut step = 1.0;
        while step >= 1e-10 {
            let (na, nb) = (a + step * da, b + step * db);
            let nf = objective(na, nb);
            if nf < fval + 1e-4 * step * gd {
                a = na;
                b = nb;
                fval = nf;
                break;
            }
            step /= 2.0;
        }
        if step < 1e-10 {
            break;
        }
    }
    (a, b)
}

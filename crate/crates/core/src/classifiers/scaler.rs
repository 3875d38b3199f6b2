use serde::{Deserialize, Serialize};

use super::FeatureMatrix;
use crate::{Error, Result};

/// Columns with a standard deviation below this are only centered.
pub const DEGENERATE_STD: f64 = 1e-12;

/// Per-column z-scoring with population statistics from the training rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StandardScaler {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl StandardScaler {
    pub fn fit(x: &FeatureMatrix) -> Result<Self> {
        if x.rows() == 0 || x.cols() == 0 {
            return Err(Error::EmptyMatrix);
        }
        let n = x.rows() as f64;
        let mut mean = vec![0.0; x.cols()];
        for row in x.iter_rows() {
            for (m, v) in mean.iter_mut().zip(row) {
                *m += v;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n);
        let mut var = vec![0.0; x.cols()];
        for row in x.iter_rows() {
            for ((s, v), m) in var.iter_mut().zip(row).zip(&mean) {
                *s += (v - m) * (v - m);
            }
        }
        let std = var.into_iter().map(|s| (s / n).sqrt()).collect();
        Ok(Self { mean, std })
    }

    pub fn transform(&self, x: &FeatureMatrix) -> Result<FeatureMatrix> {
        if x.cols() != self.mean.len() {
            return Err(Error::DimensionMismatch {
                expected: self.mean.len(),
                got: x.cols(),
            });
        }
        let mut out = x.clone();
        for r in 0..out.rows() {
            self.transform_row_in_place(out.row_mut(r));
        }
        Ok(out)
    }

    pub fn transform_row_in_place(&self, row: &mut [f64]) {
        for ((v, m), s) in row.iter_mut().zip(&self.mean).zip(&self.std) {
            *v -= m;
            if *s >= DEGENERATE_STD {
                *v /= s;
            }
        }
    }
}

/// Fits a scaler on `train` and returns it with the transformed matrix.
pub fn standardize(train: &FeatureMatrix) -> Result<(StandardScaler, FeatureMatrix)> {
    let scaler = StandardScaler::fit(train)?;
    let transformed = scaler.transform(train)?;
    Ok((scaler, transformed))
}

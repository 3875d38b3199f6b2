//! Agent-identity classifiers.
//!
//! Three from-scratch families share one interface: a [`ClassifierSpec`]
//! names the family and variant plus a hyperparameter grid, [`train_classifier`]
//! fits one grid point, and [`grid_search_cv`] picks the best point by
//! stratified k-fold accuracy and refits on all rows.

mod cv;
mod features;
mod logreg;
mod scaler;
mod svm;
mod tree;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use cv::{grid_search_cv, stratified_folds, GridSearchResult, DEFAULT_FOLDS};
pub use features::{agent_features, window_dataset};
pub use logreg::{LogRegModel, MAX_ITERATIONS as LOGREG_MAX_ITERATIONS, TOLERANCE as LOGREG_TOLERANCE};
pub use scaler::{standardize, StandardScaler, DEGENERATE_STD};
pub use svm::{SvmModel, KKT_TOLERANCE};
pub use tree::{TreeModel, DEFAULT_MAX_DEPTH, DEFAULT_MIN_LEAF};

use crate::{Error, Result};

/// Dense row-major `N × F` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl FeatureMatrix {
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for row in rows {
            if row.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    got: row.len(),
                });
            }
            data.extend(row);
        }
        Ok(Self { rows: n, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[f64]> {
        (0..self.rows).map(move |i| self.row(i))
    }

    /// Rows at `indices`, in that order.
    pub fn select(&self, indices: &[usize]) -> Self {
        let mut data = Vec::with_capacity(indices.len() * self.cols);
        for &i in indices {
            data.extend_from_slice(self.row(i));
        }
        Self {
            rows: indices.len(),
            cols: self.cols,
            data,
        }
    }

    fn check_finite(&self) -> Result<()> {
        match self.data.iter().position(|v| !v.is_finite()) {
            Some(k) => Err(Error::NonFiniteFeature {
                row: k / self.cols.max(1),
                col: k % self.cols.max(1),
            }),
            None => Ok(()),
        }
    }
}

/// Per-row class probabilities; column `k` is agent `k`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbabilityMatrix {
    rows: Vec<[f64; 2]>,
}

impl ProbabilityMatrix {
    pub fn new(rows: Vec<[f64; 2]>) -> Result<Self> {
        for row in &rows {
            if row.iter().any(|p| !(0.0..=1.0).contains(p)) || (row[0] + row[1] - 1.0).abs() > 1e-9 {
                return Err(Error::Precondition(format!("invalid probability row {row:?}")));
            }
        }
        Ok(Self { rows })
    }

    pub fn rows(&self) -> &[[f64; 2]] {
        &self.rows
    }

    pub fn get(&self, row: usize, class: usize) -> f64 {
        self.rows[row][class]
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kernel {
    Rbf,
    Linear,
    Poly,
    Sigmoid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Criterion {
    Gini,
    Entropy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Penalty {
    L1,
    L2,
    ElasticNet,
}

/// Family and variant in one value, so an illegal pairing cannot be built.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "family", content = "variant", rename_all = "lowercase")]
pub enum ClassifierKind {
    Svm(Kernel),
    Tree(Criterion),
    #[serde(rename = "logreg")]
    LogReg(Penalty),
}

impl ClassifierKind {
    pub fn family(&self) -> &'static str {
        match self {
            ClassifierKind::Svm(_) => "svm",
            ClassifierKind::Tree(_) => "tree",
            ClassifierKind::LogReg(_) => "logreg",
        }
    }

    pub fn variant(&self) -> &'static str {
        match self {
            ClassifierKind::Svm(Kernel::Rbf) => "rbf",
            ClassifierKind::Svm(Kernel::Linear) => "linear",
            ClassifierKind::Svm(Kernel::Poly) => "poly",
            ClassifierKind::Svm(Kernel::Sigmoid) => "sigmoid",
            ClassifierKind::Tree(Criterion::Gini) => "gini",
            ClassifierKind::Tree(Criterion::Entropy) => "entropy",
            ClassifierKind::LogReg(Penalty::L1) => "l1",
            ClassifierKind::LogReg(Penalty::L2) => "l2",
            ClassifierKind::LogReg(Penalty::ElasticNet) => "elasticnet",
        }
    }
}

impl fmt::Display for ClassifierKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.family(), self.variant())
    }
}

impl FromStr for ClassifierKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        ClassifierSpec::canonical()
            .into_iter()
            .map(|spec| spec.kind)
            .find(|k| k.to_string() == s)
            .ok_or_else(|| format!("unknown classifier {s:?}"))
    }
}

/// One hyperparameter point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum Hyper {
    /// `width` is the RBF length scale; other kernels ignore it.
    Svm { c: f64, width: Option<f64> },
    Tree { max_depth: usize, min_leaf: usize },
    /// `c` is the inverse regularization strength; `l1_ratio` mixes L1 into L2.
    #[serde(rename = "logreg")]
    LogReg { c: f64, l1_ratio: f64 },
}

pub const SVM_PENALTIES: [f64; 3] = [0.1, 1.0, 10.0];
pub const RBF_WIDTHS: [f64; 2] = [0.1, 1.0];
pub const LOGREG_STRENGTHS: [f64; 4] = [0.01, 0.1, 1.0, 10.0];
pub const ELASTICNET_MIXES: [f64; 3] = [0.25, 0.5, 0.75];
pub const POLY_DEGREE: i32 = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifierSpec {
    pub kind: ClassifierKind,
    pub grid: Vec<Hyper>,
}

impl ClassifierSpec {
    /// The spec for `kind` with its default grid.
    pub fn new(kind: ClassifierKind) -> Self {
        let grid = match kind {
            ClassifierKind::Svm(Kernel::Rbf) => SVM_PENALTIES
                .iter()
                .flat_map(|&c| RBF_WIDTHS.iter().map(move |&w| Hyper::Svm { c, width: Some(w) }))
                .collect(),
            ClassifierKind::Svm(_) => SVM_PENALTIES
                .iter()
                .map(|&c| Hyper::Svm { c, width: None })
                .collect(),
            ClassifierKind::Tree(_) => vec![Hyper::Tree {
                max_depth: DEFAULT_MAX_DEPTH,
                min_leaf: DEFAULT_MIN_LEAF,
            }],
            ClassifierKind::LogReg(penalty) => {
                let mixes: &[f64] = match penalty {
                    Penalty::L1 => &[1.0],
                    Penalty::L2 => &[0.0],
                    Penalty::ElasticNet => &ELASTICNET_MIXES,
                };
                LOGREG_STRENGTHS
                    .iter()
                    .flat_map(|&c| mixes.iter().map(move |&l1_ratio| Hyper::LogReg { c, l1_ratio }))
                    .collect()
            }
        };
        Self { kind, grid }
    }

    pub fn with_grid(kind: ClassifierKind, grid: Vec<Hyper>) -> Result<Self> {
        let spec = Self { kind, grid };
        spec.validate()?;
        Ok(spec)
    }

    /// The nine canonical specs: four SVM kernels, two tree criteria,
    /// three logistic penalties.
    pub fn canonical() -> Vec<Self> {
        let kinds = [
            ClassifierKind::Svm(Kernel::Rbf),
            ClassifierKind::Svm(Kernel::Linear),
            ClassifierKind::Svm(Kernel::Poly),
            ClassifierKind::Svm(Kernel::Sigmoid),
            ClassifierKind::Tree(Criterion::Gini),
            ClassifierKind::Tree(Criterion::Entropy),
            ClassifierKind::LogReg(Penalty::L1),
            ClassifierKind::LogReg(Penalty::L2),
            ClassifierKind::LogReg(Penalty::ElasticNet),
        ];
        kinds.into_iter().map(Self::new).collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid.is_empty() {
            return Err(Error::InvalidSpec(format!("{}: empty grid", self.kind)));
        }
        for hyper in &self.grid {
            check_hyper(self.kind, hyper)?;
        }
        Ok(())
    }
}

fn check_hyper(kind: ClassifierKind, hyper: &Hyper) -> Result<()> {
    let ok = match (kind, hyper) {
        (ClassifierKind::Svm(kernel), Hyper::Svm { c, width }) => {
            *c > 0.0 && (kernel != Kernel::Rbf || width.is_some_and(|w| w > 0.0))
        }
        (ClassifierKind::Tree(_), Hyper::Tree { min_leaf, .. }) => *min_leaf >= 1,
        (ClassifierKind::LogReg(penalty), Hyper::LogReg { c, l1_ratio }) => {
            *c > 0.0
                && match penalty {
                    Penalty::L1 => *l1_ratio == 1.0,
                    Penalty::L2 => *l1_ratio == 0.0,
                    Penalty::ElasticNet => (0.0..=1.0).contains(l1_ratio),
                }
        }
        _ => false,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidSpec(format!("{hyper:?} is not valid for {kind}")))
    }
}

/// A fitted classifier.
#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Svm(SvmModel),
    Tree(TreeModel),
    LogReg(LogRegModel),
}

impl Model {
    pub fn n_features(&self) -> usize {
        match self {
            Model::Svm(m) => m.n_features(),
            Model::Tree(m) => m.n_features(),
            Model::LogReg(m) => m.n_features(),
        }
    }

    pub fn predict_proba_row(&self, x: &[f64]) -> [f64; 2] {
        match self {
            Model::Svm(m) => m.predict_proba_row(x),
            Model::Tree(m) => m.predict_proba_row(x),
            Model::LogReg(m) => m.predict_proba_row(x),
        }
    }

    pub fn predict_proba(&self, x: &FeatureMatrix) -> Result<ProbabilityMatrix> {
        predict_proba(self, x)
    }

    /// Most probable class; ties go to class 0.
    pub fn predict_row(&self, x: &[f64]) -> usize {
        let p = self.predict_proba_row(x);
        usize::from(p[1] > p[0])
    }
}

/// Fits one hyperparameter point. `x` is expected to be standardized.
pub fn train_classifier(kind: ClassifierKind, x: &FeatureMatrix, y: &[usize], hyper: &Hyper) -> Result<Model> {
    check_hyper(kind, hyper)?;
    check_training_set(x, y)?;
    Ok(match (kind, *hyper) {
        (ClassifierKind::Svm(kernel), Hyper::Svm { c, width }) => {
            Model::Svm(SvmModel::fit(x, y, kernel, c, width)?)
        }
        (ClassifierKind::Tree(criterion), Hyper::Tree { max_depth, min_leaf }) => {
            Model::Tree(TreeModel::fit(x, y, criterion, max_depth, min_leaf))
        }
        (ClassifierKind::LogReg(_), Hyper::LogReg { c, l1_ratio }) => {
            Model::LogReg(LogRegModel::fit(x, y, c, l1_ratio))
        }
        _ => unreachable!("checked by check_hyper"),
    })
}

fn check_training_set(x: &FeatureMatrix, y: &[usize]) -> Result<()> {
    if x.rows() == 0 || x.cols() == 0 {
        return Err(Error::EmptyMatrix);
    }
    if y.len() != x.rows() {
        return Err(Error::DimensionMismatch {
            expected: x.rows(),
            got: y.len(),
        });
    }
    if let Some(bad) = y.iter().find(|l| **l > 1) {
        return Err(Error::Precondition(format!("label {bad} is not 0 or 1")));
    }
    if !(y.contains(&0) && y.contains(&1)) {
        return Err(Error::SingleClass);
    }
    x.check_finite()
}

pub fn predict_proba(model: &Model, x: &FeatureMatrix) -> Result<ProbabilityMatrix> {
    if x.cols() != model.n_features() {
        return Err(Error::DimensionMismatch {
            expected: model.n_features(),
            got: x.cols(),
        });
    }
    Ok(ProbabilityMatrix {
        rows: x.iter_rows().map(|r| model.predict_proba_row(r)).collect(),
    })
}

/// Numerically stable logistic function.
pub(crate) fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

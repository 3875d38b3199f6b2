use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{train_classifier, ClassifierSpec, FeatureMatrix, Hyper, Model};
use crate::{Error, Result};

pub const DEFAULT_FOLDS: usize = 5;

/// Best grid point, its mean fold accuracy, and the model refit on all rows.
#[derive(Debug, Clone)]
pub struct GridSearchResult {
    pub model: Model,
    pub best: Hyper,
    pub cv_accuracy: f64,
    /// Mean fold accuracy per grid point, in grid order.
    pub scores: Vec<f64>,
}

/// Fold index per sample. Each class is shuffled with `seed` and dealt
/// round-robin, so every fold holds at least one sample of each class.
pub fn stratified_folds(y: &[usize], folds: usize, seed: u64) -> Result<Vec<usize>> {
    if folds < 2 {
        return Err(Error::Precondition(format!("need at least 2 folds, got {folds}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut assignment = vec![0; y.len()];
    for class in 0..2 {
        let mut members: Vec<usize> = (0..y.len()).filter(|&i| y[i] == class).collect();
        if members.len() < folds {
            return Err(Error::TooFewForFolds {
                folds,
                class,
                count: members.len(),
            });
        }
        members.shuffle(&mut rng);
        for (k, i) in members.into_iter().enumerate() {
            assignment[i] = k % folds;
        }
    }
    Ok(assignment)
}

/// Scores every grid point by mean stratified k-fold accuracy and refits
/// the winner on all of `x`. Ties keep the earlier grid point.
pub fn grid_search_cv(
    spec: &ClassifierSpec,
    x: &FeatureMatrix,
    y: &[usize],
    folds: usize,
    seed: u64,
) -> Result<GridSearchResult> {
    spec.validate()?;
    if y.len() != x.rows() {
        return Err(Error::DimensionMismatch {
            expected: x.rows(),
            got: y.len(),
        });
    }
    let assignment = stratified_folds(y, folds, seed)?;
    let splits: Vec<(Vec<usize>, Vec<usize>)> = (0..folds)
        .map(|k| (0..y.len()).partition(|&i| assignment[i] != k))
        .collect();

    let mut scores = Vec::with_capacity(spec.grid.len());
    for hyper in &spec.grid {
        let mut total = 0.0;
        for (train, test) in &splits {
            let train_y: Vec<usize> = train.iter().map(|&i| y[i]).collect();
            let model = train_classifier(spec.kind, &x.select(train), &train_y, hyper)?;
            let correct = test
                .iter()
                .filter(|&&i| model.predict_row(x.row(i)) == y[i])
                .count();
            total += correct as f64 / test.len() as f64;
        }
        scores.push(total / folds as f64);
    }

    let mut best = 0;
    for (k, s) in scores.iter().enumerate() {
        if *s > scores[best] {
            best = k;
        }
    }
    let model = train_classifier(spec.kind, x, y, &spec.grid[best])?;
    Ok(GridSearchResult {
        model,
        best: spec.grid[best],
        cv_accuracy: scores[best],
        scores,
    })
}

#[cfg(test)]
mod tests {
    use super::super::{ClassifierKind, Criterion, Penalty};
    use super::*;

    #[test]
    fn folds_are_stratified_and_seeded() {
        let y: Vec<usize> = (0..23).map(|i| usize::from(i % 3 == 0)).collect();
        let a = stratified_folds(&y, 5, 9).unwrap();
        assert_eq!(a, stratified_folds(&y, 5, 9).unwrap());
        assert_ne!(a, stratified_folds(&y, 5, 10).unwrap());
        for k in 0..5 {
            for class in 0..2 {
                assert!((0..y.len()).any(|i| a[i] == k && y[i] == class));
            }
        }
    }

    #[test]
    fn too_few_for_folds() {
        let y = [0, 0, 0, 0, 0, 1, 1, 1, 1];
        assert!(matches!(
            stratified_folds(&y, 5, 0),
            Err(Error::TooFewForFolds { class: 1, count: 4, .. })
        ));
    }

    fn separable(n: usize) -> (FeatureMatrix, Vec<usize>) {
        let rows = (0..n)
            .map(|i| {
                let side = if i % 2 == 0 { -1.0 } else { 1.0 };
                vec![side * (1.0 + (i % 7) as f64 * 0.1), ((i * 37) % 11) as f64 / 11.0 - 0.5]
            })
            .collect();
        (FeatureMatrix::from_rows(rows).unwrap(), (0..n).map(|i| i % 2).collect())
    }

    #[test]
    fn single_point_grid_equals_direct_fit() {
        let (x, y) = separable(30);
        let kind = ClassifierKind::Tree(Criterion::Gini);
        let spec = ClassifierSpec::new(kind);
        let result = grid_search_cv(&spec, &x, &y, 5, 1).unwrap();
        let direct = train_classifier(kind, &x, &y, &spec.grid[0]).unwrap();
        assert_eq!(result.model, direct);
    }

    #[test]
    fn better_grid_point_wins() {
        let (x, y) = separable(40);
        // c = 1e-6 with pure L1 zeroes every weight: chance-level accuracy
        let spec = ClassifierSpec::with_grid(
            ClassifierKind::LogReg(Penalty::L1),
            vec![
                Hyper::LogReg { c: 1e-6, l1_ratio: 1.0 },
                Hyper::LogReg { c: 10.0, l1_ratio: 1.0 },
            ],
        )
        .unwrap();
        let result = grid_search_cv(&spec, &x, &y, 5, 3).unwrap();
        assert!(result.scores[0] <= 0.5, "{:?}", result.scores);
        assert!(result.scores[1] >= 0.95, "{:?}", result.scores);
        assert_eq!(result.best, spec.grid[1]);
    }
}

//! Binary CART decision tree grown greedily on Gini impurity or entropy.

use super::{Criterion, FeatureMatrix};

pub const DEFAULT_MAX_DEPTH: usize = 5;
pub const DEFAULT_MIN_LEAF: usize = 2;

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Leaf {
        counts: [usize; 2],
    },
    Split {
        feature: usize,
        threshold: f64,
        left: Box<Node>,
        right: Box<Node>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct TreeModel {
    root: Node,
    n_features: usize,
    criterion: Criterion,
}

// Both impurities are written symmetrically in the two class counts so that
// swapping labels reproduces the same tree bit for bit.
fn impurity(criterion: Criterion, counts: [usize; 2]) -> f64 {
    let total = (counts[0] + counts[1]) as f64;
    if total == 0.0 {
        return 0.0;
    }
    let p0 = counts[0] as f64 / total;
    let p1 = counts[1] as f64 / total;
    match criterion {
        Criterion::Gini => 2.0 * p0 * p1,
        Criterion::Entropy => {
            let h = |p: f64| if p > 0.0 { -p * p.log2() } else { 0.0 };
            h(p0) + h(p1)
        }
    }
}

struct Builder<'a> {
    x: &'a FeatureMatrix,
    y: &'a [usize],
    criterion: Criterion,
    max_depth: usize,
    min_leaf: usize,
}

impl Builder<'_> {
    fn counts(&self, idx: &[usize]) -> [usize; 2] {
        let ones = idx.iter().filter(|&&i| self.y[i] == 1).count();
        [idx.len() - ones, ones]
    }

    fn grow(&self, idx: Vec<usize>, depth: usize) -> Node {
        let counts = self.counts(&idx);
        if depth >= self.max_depth
            || counts[0] == 0
            || counts[1] == 0
            || idx.len() < 2 * self.min_leaf
        {
            return Node::Leaf { counts };
        }
        let Some((feature, threshold)) = self.best_split(&idx, counts) else {
            return Node::Leaf { counts };
        };
        let (left, right): (Vec<usize>, Vec<usize>) =
            idx.into_iter().partition(|&i| self.x.row(i)[feature] <= threshold);
        Node::Split {
            feature,
            threshold,
            left: Box::new(self.grow(left, depth + 1)),
            right: Box::new(self.grow(right, depth + 1)),
        }
    }

    /// Lowest weighted child impurity over all features and midpoints;
    /// ties keep the first candidate. `None` when nothing beats the parent.
    fn best_split(&self, idx: &[usize], counts: [usize; 2]) -> Option<(usize, f64)> {
        let n = idx.len();
        let parent = impurity(self.criterion, counts) * n as f64;
        let mut best: Option<(f64, usize, f64)> = None;
        let mut sorted = idx.to_vec();
        for feature in 0..self.x.cols() {
            let value = |i: usize| self.x.row(i)[feature];
            sorted.sort_by(|a, b| value(*a).total_cmp(&value(*b)).then(a.cmp(b)));
            let mut left = [0usize; 2];
            for k in 0..n - 1 {
                left[self.y[sorted[k]]] += 1;
                let (lo, hi) = (value(sorted[k]), value(sorted[k + 1]));
                if lo == hi {
                    continue;
                }
                let n_left = k + 1;
                if n_left < self.min_leaf || n - n_left < self.min_leaf {
                    continue;
                }
                let right = [counts[0] - left[0], counts[1] - left[1]];
                let score = impurity(self.criterion, left) * n_left as f64
                    + impurity(self.criterion, right) * (n - n_left) as f64;
                if best.is_none_or(|(s, _, _)| score < s) {
                    best = Some((score, feature, lo + (hi - lo) / 2.0));
                }
            }
        }
        match best {
            Some((score, feature, threshold)) if score < parent - 1e-12 => Some((feature, threshold)),
            _ => None,
        }
    }
}

impl TreeModel {
    pub fn fit(x: &FeatureMatrix, y: &[usize], criterion: Criterion, max_depth: usize, min_leaf: usize) -> Self {
        let builder = Builder {
            x,
            y,
            criterion,
            max_depth,
            min_leaf: min_leaf.max(1),
        };
        Self {
            root: builder.grow((0..x.rows()).collect(), 0),
            n_features: x.cols(),
            criterion,
        }
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn criterion(&self) -> Criterion {
        self.criterion
    }

    pub fn depth(&self) -> usize {
        fn depth(node: &Node) -> usize {
            match node {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + depth(left).max(depth(right)),
            }
        }
        depth(&self.root)
    }

    /// Class frequencies of the leaf `x` falls into.
    pub fn predict_proba_row(&self, x: &[f64]) -> [f64; 2] {
        let mut node = &self.root;
        loop {
            match node {
                Node::Leaf { counts } => {
                    let total = (counts[0] + counts[1]) as f64;
                    return [counts[0] as f64 / total, counts[1] as f64 / total];
                }
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    node = if x[*feature] <= *threshold { left } else { right };
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn column(values: &[f64]) -> FeatureMatrix {
        FeatureMatrix::from_rows(values.iter().map(|v| vec![*v]).collect()).unwrap()
    }

    #[test]
    fn pure_leaves_have_unit_probability() {
        let x = column(&[-2.0, -1.5, -1.0, 1.0, 1.5, 2.0]);
        let tree = TreeModel::fit(&x, &[0, 0, 0, 1, 1, 1], Criterion::Gini, 5, 2);
        assert_eq!(tree.depth(), 1);
        assert_eq!(tree.predict_proba_row(&[-3.0]), [1.0, 0.0]);
        assert_eq!(tree.predict_proba_row(&[3.0]), [0.0, 1.0]);
    }

    #[test]
    fn leaf_frequencies() {
        let x = column(&[0.0, 1.0, 2.0, 3.0]);
        let tree = TreeModel::fit(&x, &[0, 0, 1, 0], Criterion::Entropy, 0, 2);
        assert_eq!(tree.predict_proba_row(&[10.0]), [0.75, 0.25]);
    }

    #[test]
    fn min_leaf_blocks_singleton_split() {
        // the only pure split isolates one sample
        let x = column(&[0.0, 1.0, 2.0, 3.0]);
        let tree = TreeModel::fit(&x, &[0, 0, 0, 1], Criterion::Gini, 5, 2);
        assert!(tree.predict_proba_row(&[3.0])[1] < 1.0);
        let loose = TreeModel::fit(&x, &[0, 0, 0, 1], Criterion::Gini, 5, 1);
        assert_eq!(loose.predict_proba_row(&[3.0]), [0.0, 1.0]);
    }

    #[test]
    fn depth_cap_respected() {
        let values: Vec<f64> = (0..64).map(|i| i as f64).collect();
        let labels: Vec<usize> = (0..64).map(|i| i % 2).collect();
        let tree = TreeModel::fit(&column(&values), &labels, Criterion::Gini, 3, 1);
        assert!(tree.depth() <= 3);
    }

    #[test]
    fn impurities() {
        assert_eq!(impurity(Criterion::Gini, [2, 2]), 0.5);
        assert_eq!(impurity(Criterion::Entropy, [2, 2]), 1.0);
        assert_eq!(impurity(Criterion::Gini, [3, 0]), 0.0);
        assert_eq!(impurity(Criterion::Entropy, [0, 3]), 0.0);
    }
}

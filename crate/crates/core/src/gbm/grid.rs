use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::model::{train, Ensemble, Hyperparams, Regressor};
use crate::error::{Error, Result};
use crate::features::FeatureMatrix;
use crate::stats::{metrics, MetricReport};

/// Candidate values per hyperparameter; the grid is their Cartesian product.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridRanges {
    pub max_depth: Vec<usize>,
    pub n_trees: Vec<usize>,
    pub gamma: Vec<f64>,
    pub lambda: Vec<f64>,
    pub learning_rate: Vec<f64>,
}

impl Default for GridRanges {
    fn default() -> Self {
        GridRanges {
            max_depth: vec![5, 8, 11, 15],
            n_trees: vec![20, 100, 300, 500],
            gamma: vec![0.05, 0.5, 1.0, 2.0],
            lambda: vec![1.0],
            learning_rate: vec![0.3],
        }
    }
}

fn dedup<T: PartialEq + Copy>(v: &[T]) -> Vec<T> {
    let mut out: Vec<T> = Vec::with_capacity(v.len());
    for &x in v {
        if !out.contains(&x) {
            out.push(x);
        }
    }
    out
}

impl GridRanges {
    /// Every distinct combination, depth outermost and learning rate innermost.
    pub fn combinations(&self) -> Vec<Hyperparams> {
        let mut out = Vec::new();
        for &max_depth in &dedup(&self.max_depth) {
            for &n_trees in &dedup(&self.n_trees) {
                for &gamma in &dedup(&self.gamma) {
                    for &lambda in &dedup(&self.lambda) {
                        for &learning_rate in &dedup(&self.learning_rate) {
                            out.push(Hyperparams {
                                max_depth,
                                n_trees,
                                gamma,
                                lambda,
                                learning_rate,
                            });
                        }
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridRow {
    pub params: Hyperparams,
    /// Scores on the validation matrix.
    pub validation: MetricReport,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridResult {
    pub best: Hyperparams,
    pub best_model: Ensemble,
    /// One row per combination, in [`GridRanges::combinations`] order.
    pub table: Vec<GridRow>,
}

fn describe(p: &Hyperparams) -> String {
    format!(
        "grid combination max_depth={} n_trees={} gamma={} lambda={} learning_rate={}",
        p.max_depth, p.n_trees, p.gamma, p.lambda, p.learning_rate
    )
}

/// Trains every combination on `train_x`, scores MAE on `val_x` and returns
/// the best. Ties go to fewer trees, then smaller depth, then the earlier
/// combination.
///
/// Combinations that differ only in tree count share one training run: a
/// boosted model with `k` trees is the first `k` trees of a longer run.
pub fn grid_search(
    train_x: &FeatureMatrix,
    val_x: &FeatureMatrix,
    ranges: &GridRanges,
) -> Result<GridResult> {
    let combos = ranges.combinations();
    if combos.is_empty() {
        return Err(Error::Parameter("hyperparameter grid is empty".into()));
    }
    for p in &combos {
        p.validate().map_err(|e| e.context(describe(p)))?;
    }
    if train_x.feature_names() != val_x.feature_names() {
        return Err(Error::Input(
            "training and validation matrices have different features".into(),
        ));
    }
    let tree_counts = {
        let mut t = dedup(&ranges.n_trees);
        t.sort_unstable();
        t
    };
    let max_trees = *tree_counts.last().expect("grid is non-empty");

    // Distinct (depth, gamma, lambda, learning_rate) settings in first-seen order.
    let mut families: Vec<Hyperparams> = Vec::new();
    for p in &combos {
        let fam = Hyperparams { n_trees: max_trees, ..*p };
        if !families.contains(&fam) {
            families.push(fam);
        }
    }
    let runs: Vec<(Ensemble, Vec<MetricReport>)> = families
        .par_iter()
        .map(|fam| {
            let model = train(train_x, fam).map_err(|e| e.context(describe(fam)))?;
            let scores = prefix_scores(&model, val_x, &tree_counts)?;
            Ok((model, scores))
        })
        .collect::<Result<_>>()?;

    let mut table = Vec::with_capacity(combos.len());
    for p in &combos {
        let f = families
            .iter()
            .position(|fam| *fam == Hyperparams { n_trees: max_trees, ..*p })
            .expect("every combination belongs to a family");
        let k = tree_counts.binary_search(&p.n_trees).expect("count is in the list");
        table.push(GridRow {
            params: *p,
            validation: runs[f].1[k],
        });
    }

    let mut best = 0;
    for (i, row) in table.iter().enumerate().skip(1) {
        let b = &table[best];
        let better = row.validation.mae < b.validation.mae
            || (row.validation.mae == b.validation.mae
                && (row.params.n_trees, row.params.max_depth)
                    < (b.params.n_trees, b.params.max_depth));
        if better {
            best = i;
        }
    }
    let best_params = table[best].params;
    let fam = families
        .iter()
        .position(|fam| *fam == Hyperparams { n_trees: max_trees, ..best_params })
        .expect("best combination belongs to a family");
    let best_model = Ensemble {
        trees: runs[fam].0.trees[..best_params.n_trees].to_vec(),
        ..runs[fam].0.clone()
    };
    Ok(GridResult {
        best: best_params,
        best_model,
        table,
    })
}

/// Validation metrics of the model truncated to each of `counts` trees
/// (ascending).
fn prefix_scores(model: &Ensemble, x: &FeatureMatrix, counts: &[usize]) -> Result<Vec<MetricReport>> {
    super::model::check_width(model.n_features(), x.n_features())?;
    let mut sums = vec![0.0; x.n_rows()];
    let mut done = 0;
    let mut out = Vec::with_capacity(counts.len());
    for &k in counts {
        for tree in &model.trees[done..k] {
            for (s, r) in sums.iter_mut().zip(x.rows()) {
                *s += tree.predict(r);
            }
        }
        done = k;
        let pred: Vec<f64> = sums
            .iter()
            .map(|s| model.base_score + model.learning_rate * s)
            .collect();
        out.push(metrics(x.target(), &pred)?);
    }
    Ok(out)
}

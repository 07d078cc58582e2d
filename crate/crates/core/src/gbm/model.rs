use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::grow::{grow_tree, Presorted, TreeParams};
use super::tree::TreeNode;
use crate::error::{Error, Result};
use crate::features::FeatureMatrix;
use crate::linalg::CompensatedSum;

pub const MODEL_SCHEMA_VERSION: u32 = 1;

/// Anything that maps a feature row to a room temperature.
pub trait Regressor: Sync {
    fn n_features(&self) -> usize;

    /// Prediction for a row of the right width; callers check the width.
    fn predict_row(&self, row: &[f64]) -> f64;

    fn predict_matrix(&self, x: &FeatureMatrix) -> Result<Vec<f64>> {
        check_width(self.n_features(), x.n_features())?;
        Ok(x.rows().map(|r| self.predict_row(r)).collect())
    }
}

pub(crate) fn check_width(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::Input(format!(
            "model expects {expected} features, input has {got}"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hyperparams {
    pub max_depth: usize,
    pub n_trees: usize,
    /// Minimum loss reduction for a split.
    pub gamma: f64,
    /// L2 penalty on leaf weights.
    pub lambda: f64,
    pub learning_rate: f64,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Hyperparams {
            max_depth: 8,
            n_trees: 100,
            gamma: 0.5,
            lambda: 1.0,
            learning_rate: 0.3,
        }
    }
}

impl Hyperparams {
    pub fn validate(&self) -> Result<()> {
        if self.max_depth < 1 {
            return Err(Error::Parameter("max_depth must be at least 1".into()));
        }
        if !(self.gamma >= 0.0 && self.gamma.is_finite()) {
            return Err(Error::Parameter(format!("gamma {} must be >= 0", self.gamma)));
        }
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(Error::Parameter(format!("lambda {} must be >= 0", self.lambda)));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate <= 1.0) {
            return Err(Error::Parameter(format!(
                "learning_rate {} must lie in (0, 1]",
                self.learning_rate
            )));
        }
        Ok(())
    }
}

/// Boosted tree ensemble: `base_score + learning_rate · Σ tree(x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ensemble {
    pub schema_version: u32,
    pub base_score: f64,
    pub learning_rate: f64,
    pub lambda: f64,
    pub gamma: f64,
    pub max_depth: usize,
    pub feature_names: Vec<String>,
    pub trees: Vec<TreeNode>,
}

impl Regressor for Ensemble {
    fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    fn predict_row(&self, row: &[f64]) -> f64 {
        self.base_score + self.learning_rate * self.trees.iter().map(|t| t.predict(row)).sum::<f64>()
    }
}

impl Ensemble {
    /// Model that always predicts `base_score`.
    pub fn constant(base_score: f64, feature_names: Vec<String>) -> Self {
        Ensemble {
            schema_version: MODEL_SCHEMA_VERSION,
            base_score,
            learning_rate: 1.0,
            lambda: 0.0,
            gamma: 0.0,
            max_depth: 1,
            feature_names,
            trees: Vec::new(),
        }
    }

    /// Checked single-row prediction.
    pub fn predict(&self, row: &[f64]) -> Result<f64> {
        check_width(self.n_features(), row.len())?;
        Ok(self.predict_row(row))
    }

    /// The same model restricted to its first `k` trees.
    pub fn truncated(&self, k: usize) -> Ensemble {
        Ensemble {
            trees: self.trees[..k.min(self.trees.len())].to_vec(),
            ..self.clone()
        }
    }

    /// Per-feature sum of split gains over all trees, normalized to sum to 1.
    /// All zeros when the ensemble has no splits.
    pub fn feature_importance_gain(&self) -> BTreeMap<String, f64> {
        let mut totals = vec![0.0; self.n_features()];
        for t in &self.trees {
            t.accumulate_gain(&mut totals);
        }
        let sum: f64 = totals.iter().sum();
        self.feature_names
            .iter()
            .zip(totals)
            .map(|(n, g)| (n.clone(), if sum > 0.0 { g / sum } else { 0.0 }))
            .collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Ensemble> {
        let m: Ensemble = serde_json::from_str(text)?;
        if m.schema_version != MODEL_SCHEMA_VERSION {
            return Err(Error::Input(format!(
                "unsupported model schema version {}",
                m.schema_version
            )));
        }
        let mut bad = false;
        for t in &m.trees {
            t.for_each_split(&mut |f, thr, _| bad |= f >= m.feature_names.len() || !thr.is_finite());
        }
        if bad {
            return Err(Error::Input("model references an invalid split".into()));
        }
        Ok(m)
    }

    pub fn load(path: &Path) -> Result<Ensemble> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read model {}: {e}", path.display())))?;
        Ensemble::from_json(&text)
    }
}

fn check_training_input(x: &FeatureMatrix) -> Result<()> {
    if x.n_rows() < 2 {
        return Err(Error::Training(format!(
            "need at least 2 training rows, got {}",
            x.n_rows()
        )));
    }
    if let Some(i) = x.rows().position(|r| r.iter().any(|v| !v.is_finite())) {
        return Err(Error::Numeric(format!("non-finite feature value in row {i}")));
    }
    if let Some(i) = x.target().iter().position(|v| !v.is_finite()) {
        return Err(Error::Numeric(format!("non-finite target in row {i}")));
    }
    Ok(())
}

/// Mean computed about the first value, so a constant target gives an exact
/// base score and exactly zero gradients.
fn shifted_mean(y: &[f64]) -> f64 {
    let y0 = y[0];
    y0 + y.iter().map(|v| v - y0).sum::<f64>() / y.len() as f64
}

pub fn train(x: &FeatureMatrix, params: &Hyperparams) -> Result<Ensemble> {
    train_traced(x, params).map(|(m, _)| m)
}

/// Trains and also returns the training MSE before the first tree and after
/// each round (`n_trees + 1` values).
pub fn train_traced(x: &FeatureMatrix, params: &Hyperparams) -> Result<(Ensemble, Vec<f64>)> {
    params.validate()?;
    check_training_input(x)?;
    let y = x.target();
    let n = y.len();
    let base_score = shifted_mean(y);
    let sorted = Presorted::new(x);
    let tree_params = TreeParams {
        max_depth: params.max_depth,
        lambda: params.lambda,
        gamma: params.gamma,
    };

    let mut pred = vec![base_score; n];
    let mse = |pred: &[f64]| {
        let mut acc = CompensatedSum::default();
        for (p, t) in pred.iter().zip(y) {
            acc.add((p - t) * (p - t));
        }
        acc.value() / n as f64
    };
    let mut trace = Vec::with_capacity(params.n_trees + 1);
    trace.push(mse(&pred));
    let mut trees = Vec::with_capacity(params.n_trees);
    let mut grad = vec![0.0; n];
    for _ in 0..params.n_trees {
        for ((g, p), t) in grad.iter_mut().zip(&pred).zip(y) {
            *g = p - t;
        }
        let tree = grow_tree(x, &sorted, &grad, tree_params);
        for (i, p) in pred.iter_mut().enumerate() {
            *p += params.learning_rate * tree.predict(x.row(i));
        }
        trace.push(mse(&pred));
        trees.push(tree);
    }
    let model = Ensemble {
        schema_version: MODEL_SCHEMA_VERSION,
        base_score,
        learning_rate: params.learning_rate,
        lambda: params.lambda,
        gamma: params.gamma,
        max_depth: params.max_depth,
        feature_names: x.feature_names().to_vec(),
        trees,
    };
    Ok((model, trace))
}

/// A single regression tree fit to `targets` by variance reduction, returned
/// with its training R².
pub(crate) fn fit_cart(x: &FeatureMatrix, targets: &[f64], max_depth: usize) -> Result<(TreeNode, f64)> {
    if max_depth < 1 {
        return Err(Error::Parameter("max_depth must be at least 1".into()));
    }
    let m = FeatureMatrix::new(
        x.feature_names().to_vec(),
        x.rows().flatten().copied().collect(),
        targets.to_vec(),
        x.timestamps().to_vec(),
    )?;
    check_training_input(&m)?;
    let mean = shifted_mean(targets);
    let grad: Vec<f64> = targets.iter().map(|t| mean - t).collect();
    let params = TreeParams {
        max_depth,
        lambda: 0.0,
        gamma: 0.0,
    };
    let tree = grow_tree(&m, &Presorted::new(&m), &grad, params);
    let tree = shift_leaves(tree, mean);
    let pred: Vec<f64> = m.rows().map(|r| tree.predict(r)).collect();
    let r2 = crate::stats::metrics(targets, &pred)?.r2;
    Ok((tree, r2))
}

fn shift_leaves(t: TreeNode, by: f64) -> TreeNode {
    match t {
        TreeNode::Leaf { weight } => TreeNode::leaf(weight + by),
        TreeNode::Branch {
            feature,
            threshold,
            gain,
            left,
            right,
        } => TreeNode::Branch {
            feature,
            threshold,
            gain,
            left: Box::new(shift_leaves(*left, by)),
            right: Box::new(shift_leaves(*right, by)),
        },
    }
}

use serde::{Deserialize, Serialize};

use super::EXPLAIN_SCHEMA_VERSION;
use crate::error::{Error, Result};
use crate::features::FeatureMatrix;
use crate::gbm::{fit_cart, Regressor, TreeNode};
use crate::linalg::weighted_ridge;
use crate::stats::metrics;

/// Ridge regression fit to a model's predictions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearSurrogate {
    pub schema_version: u32,
    pub feature_names: Vec<String>,
    /// Intercept and slopes in the features' own units.
    pub intercept: f64,
    pub coefficients: Vec<f64>,
    /// Intercept and slopes on standardized features.
    pub standardized_intercept: f64,
    pub standardized_coefficients: Vec<f64>,
    pub means: Vec<f64>,
    /// Population standard deviations; 0 marks a constant column, whose
    /// slope is fixed at 0.
    pub sds: Vec<f64>,
    pub lambda: f64,
    /// R² of the surrogate against the model's predictions.
    pub fidelity_r2: f64,
}

impl LinearSurrogate {
    pub fn coefficient(&self, feature: &str) -> Option<f64> {
        self.feature_names
            .iter()
            .position(|n| n == feature)
            .map(|i| self.coefficients[i])
    }

    pub fn predict_row(&self, row: &[f64]) -> f64 {
        self.intercept
            + self
                .coefficients
                .iter()
                .zip(row)
                .map(|(c, v)| c * v)
                .sum::<f64>()
    }
}

/// Fits `ŷ ≈ a + Σ βⱼ zⱼ` on standardized features `z`, with the intercept
/// left unpenalized.
pub fn fit_surrogate_ridge<M: Regressor + ?Sized>(
    model: &M,
    x: &FeatureMatrix,
    lambda: f64,
) -> Result<LinearSurrogate> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::Parameter(format!("ridge lambda {lambda} must be >= 0")));
    }
    if x.n_rows() < 2 {
        return Err(Error::Input("surrogate needs at least 2 rows".into()));
    }
    let target = model.predict_matrix(x)?;
    let n = x.n_rows() as f64;
    let width = x.n_features();
    let means: Vec<f64> = (0..width)
        .map(|j| x.rows().map(|r| r[j]).sum::<f64>() / n)
        .collect();
    let sds: Vec<f64> = (0..width)
        .map(|j| (x.rows().map(|r| (r[j] - means[j]).powi(2)).sum::<f64>() / n).sqrt())
        .collect();
    let active: Vec<usize> = (0..width).filter(|&j| sds[j] > 0.0).collect();

    let mut std_coef = vec![0.0; width];
    let std_intercept = if active.is_empty() {
        target.iter().sum::<f64>() / n
    } else {
        let rows: Vec<Vec<f64>> = x
            .rows()
            .map(|r| active.iter().map(|&j| (r[j] - means[j]) / sds[j]).collect())
            .collect();
        let (a, beta) = weighted_ridge(&rows, &target, None, lambda).map_err(|e| match e {
            Error::Numeric(m) => Error::Numeric(format!("ridge surrogate system is singular: {m}")),
            other => other,
        })?;
        for (&j, b) in active.iter().zip(beta) {
            std_coef[j] = b;
        }
        a
    };
    let coefficients: Vec<f64> = (0..width)
        .map(|j| if sds[j] > 0.0 { std_coef[j] / sds[j] } else { 0.0 })
        .collect();
    let intercept = std_intercept
        - coefficients
            .iter()
            .zip(&means)
            .map(|(c, m)| c * m)
            .sum::<f64>();
    let mut s = LinearSurrogate {
        schema_version: EXPLAIN_SCHEMA_VERSION,
        feature_names: x.feature_names().to_vec(),
        intercept,
        coefficients,
        standardized_intercept: std_intercept,
        standardized_coefficients: std_coef,
        means,
        sds,
        lambda,
        fidelity_r2: 0.0,
    };
    let fitted: Vec<f64> = x.rows().map(|r| s.predict_row(r)).collect();
    s.fidelity_r2 = metrics(&target, &fitted)?.r2;
    Ok(s)
}

/// Single regression tree fit to a model's predictions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeSurrogate {
    pub schema_version: u32,
    pub feature_names: Vec<String>,
    pub max_depth: usize,
    pub tree: TreeNode,
    pub fidelity_r2: f64,
    /// Normalized split-gain share per feature.
    pub importance: Vec<f64>,
}

pub fn fit_surrogate_tree<M: Regressor + ?Sized>(
    model: &M,
    x: &FeatureMatrix,
    max_depth: usize,
) -> Result<TreeSurrogate> {
    let target = model.predict_matrix(x)?;
    let (tree, fidelity_r2) = fit_cart(x, &target, max_depth)?;
    let mut importance = vec![0.0; x.n_features()];
    tree.accumulate_gain(&mut importance);
    let total: f64 = importance.iter().sum();
    if total > 0.0 {
        importance.iter_mut().for_each(|v| *v /= total);
    }
    Ok(TreeSurrogate {
        schema_version: EXPLAIN_SCHEMA_VERSION,
        feature_names: x.feature_names().to_vec(),
        max_depth,
        tree,
        fidelity_r2,
        importance,
    })
}

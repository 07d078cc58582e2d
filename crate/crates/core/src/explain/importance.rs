use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::means_vector;
use crate::error::Result;
use crate::features::{FeatureMatrix, FeatureMeans};
use crate::gbm::Regressor;
use crate::stats::metrics;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ImportanceMetric {
    Mae,
    Mse,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ImportanceStrategy {
    /// Replace the column with its training mean.
    MeanSubstitute,
    /// Permute the column with a seeded generator.
    Shuffle { seed: u64 },
}

/// Increase in error when one feature at a time is destroyed.
pub fn permutation_importance<M: Regressor + ?Sized>(
    model: &M,
    x: &FeatureMatrix,
    means: &FeatureMeans,
    metric: ImportanceMetric,
    strategy: ImportanceStrategy,
) -> Result<BTreeMap<String, f64>> {
    let mu = means_vector(x.feature_names(), means)?;
    let y = x.target();
    let score = |pred: &[f64]| -> Result<f64> {
        let m = metrics(y, pred)?;
        Ok(match metric {
            ImportanceMetric::Mae => m.mae,
            ImportanceMetric::Mse => m.mse,
        })
    };
    let baseline = score(&model.predict_matrix(x)?)?;
    let mut rng = match strategy {
        ImportanceStrategy::Shuffle { seed } => Some(ChaCha8Rng::seed_from_u64(seed)),
        ImportanceStrategy::MeanSubstitute => None,
    };
    let mut out = BTreeMap::new();
    let mut row = vec![0.0; x.n_features()];
    for (j, name) in x.feature_names().iter().enumerate() {
        let column: Vec<f64> = match rng.as_mut() {
            None => vec![mu[j]; x.n_rows()],
            Some(rng) => {
                let mut c = x.column(j);
                c.shuffle(rng);
                c
            }
        };
        let pred: Vec<f64> = x
            .rows()
            .zip(&column)
            .map(|(r, &v)| {
                row.copy_from_slice(r);
                row[j] = v;
                model.predict_row(&row)
            })
            .collect();
        out.insert(name.clone(), score(&pred)? - baseline);
    }
    Ok(out)
}

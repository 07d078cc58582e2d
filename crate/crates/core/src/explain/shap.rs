use super::{means_vector, Attribution, EXPLAIN_SCHEMA_VERSION};
use crate::error::{Error, Result};
use crate::features::FeatureMeans;
use crate::gbm::{check_width, Regressor};
use crate::linalg::CompensatedSum;

/// Largest feature count for exact enumeration (2ᴺ model evaluations).
pub const SHAP_MAX_FEATURES: usize = 20;

/// Exact Shapley values where features outside a coalition take their
/// background means.
pub fn shap_exact<M: Regressor + ?Sized>(
    model: &M,
    feature_names: &[String],
    instance: &[f64],
    background: &FeatureMeans,
) -> Result<Attribution> {
    let n = feature_names.len();
    if n > SHAP_MAX_FEATURES {
        return Err(Error::CombinatorialLimit {
            count: n,
            limit: SHAP_MAX_FEATURES,
        });
    }
    check_width(model.n_features(), n)?;
    check_width(n, instance.len())?;
    let bg = means_vector(feature_names, background)?;

    let mut row = bg.clone();
    let value: Vec<f64> = (0..1usize << n)
        .map(|mask| {
            for j in 0..n {
                row[j] = if mask >> j & 1 == 1 { instance[j] } else { bg[j] };
            }
            model.predict_row(&row)
        })
        .collect();

    // Weight of a coalition of size s not containing i: s!(n-s-1)!/n!.
    let mut weights = vec![0.0; n.max(1)];
    for (s, w) in weights.iter_mut().enumerate() {
        let mut binom = 1.0;
        for k in 0..s {
            binom = binom * (n - 1 - k) as f64 / (k + 1) as f64;
        }
        *w = 1.0 / (n as f64 * binom);
    }
    let contributions = (0..n)
        .map(|i| {
            let bit = 1usize << i;
            let mut acc = CompensatedSum::default();
            for mask in (0..1usize << n).filter(|m| m & bit == 0) {
                let s = mask.count_ones() as usize;
                acc.add(weights[s] * (value[mask | bit] - value[mask]));
            }
            acc.value()
        })
        .collect();
    Ok(Attribution {
        schema_version: EXPLAIN_SCHEMA_VERSION,
        base_value: value[0],
        prediction: value[(1usize << n) - 1],
        feature_names: feature_names.to_vec(),
        feature_values: instance.to_vec(),
        contributions,
    })
}

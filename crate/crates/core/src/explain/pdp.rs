use serde::{Deserialize, Serialize};

use super::EXPLAIN_SCHEMA_VERSION;
use crate::error::{Error, Result};
use crate::features::FeatureMatrix;
use crate::gbm::Regressor;

/// Columns with at most this many distinct integral values are treated as
/// categorical.
const MAX_LEVELS: usize = 32;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PdpCurve {
    pub schema_version: u32,
    pub feature: String,
    pub grid: Vec<f64>,
    pub mean_response: Vec<f64>,
    pub categorical: bool,
    /// Set when the feature is constant and the curve has a single point.
    pub constant_feature: bool,
}

/// Sorted distinct values when the column looks categorical.
pub fn is_categorical(column: &[f64]) -> Option<Vec<f64>> {
    let mut levels: Vec<f64> = Vec::new();
    for &v in column {
        if v.fract() != 0.0 {
            return None;
        }
        if !levels.contains(&v) {
            if levels.len() == MAX_LEVELS {
                return None;
            }
            levels.push(v);
        }
    }
    levels.sort_by(f64::total_cmp);
    Some(levels)
}

/// Partial dependence of the model on one feature: the mean prediction over
/// all rows with that feature set to each grid value.
///
/// The grid holds each observed level of a categorical feature, and
/// `grid_size` equispaced points from the observed minimum to maximum
/// otherwise.
pub fn pdp<M: Regressor + ?Sized>(
    model: &M,
    x: &FeatureMatrix,
    feature: &str,
    grid_size: usize,
) -> Result<PdpCurve> {
    if grid_size < 2 {
        return Err(Error::Parameter("PDP grid needs at least 2 points".into()));
    }
    crate::gbm::check_width(model.n_features(), x.n_features())?;
    if x.n_rows() == 0 {
        return Err(Error::Input("PDP needs at least one row".into()));
    }
    let j = x.feature_index(feature)?;
    let column = x.column(j);
    let (lo, hi) = column
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let levels = is_categorical(&column);
    let constant = lo == hi;
    let grid = if constant {
        vec![lo]
    } else if let Some(levels) = &levels {
        levels.clone()
    } else {
        (0..grid_size)
            .map(|k| {
                if k + 1 == grid_size {
                    hi
                } else {
                    lo + (hi - lo) * k as f64 / (grid_size - 1) as f64
                }
            })
            .collect()
    };
    let n = x.n_rows() as f64;
    let mut row = vec![0.0; x.n_features()];
    let mean_response = grid
        .iter()
        .map(|&g| {
            x.rows()
                .map(|r| {
                    row.copy_from_slice(r);
                    row[j] = g;
                    model.predict_row(&row)
                })
                .sum::<f64>()
                / n
        })
        .collect();
    Ok(PdpCurve {
        schema_version: EXPLAIN_SCHEMA_VERSION,
        feature: feature.to_string(),
        grid,
        mean_response,
        categorical: levels.is_some(),
        constant_feature: constant,
    })
}

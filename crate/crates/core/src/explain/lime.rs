use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::pdp::is_categorical;
use super::{Attribution, EXPLAIN_SCHEMA_VERSION};
use crate::error::{Error, Result};
use crate::features::FeatureMatrix;
use crate::gbm::{check_width, Regressor};
use crate::linalg::weighted_ridge;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimeConfig {
    pub n_samples: usize,
    /// Kernel width; `None` means `0.75·√N` for `N` features.
    pub kernel_width: Option<f64>,
    pub seed: u64,
    pub ridge_lambda: f64,
}

impl Default for LimeConfig {
    fn default() -> Self {
        LimeConfig {
            n_samples: 5000,
            kernel_width: None,
            seed: 42,
            ridge_lambda: 1.0,
        }
    }
}

/// Local linear explanation over same-bin indicators. `attribution.base_value`
/// is the local intercept; efficiency does not hold, `local_r2` reports the
/// fit quality instead.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimeExplanation {
    pub attribution: Attribution,
    /// Weighted R² of the local fit, in [0, 1].
    pub local_r2: f64,
    /// The instance's bin for each feature, e.g. `"22.50 < MVART <= 23.10"`.
    pub labels: Vec<String>,
    pub kernel_width: f64,
    pub n_samples: usize,
}

enum Bins {
    Levels(Vec<f64>),
    /// Quartile edges; bin k is `(edge[k-1], edge[k]]`.
    Edges(Vec<f64>),
}

impl Bins {
    fn of(column: &mut [f64]) -> Bins {
        if let Some(levels) = is_categorical(column) {
            return Bins::Levels(levels);
        }
        column.sort_by(f64::total_cmp);
        let q = |p: f64| {
            let pos = p * (column.len() - 1) as f64;
            let (i, frac) = (pos.floor() as usize, pos.fract());
            let hi = column[(i + 1).min(column.len() - 1)];
            column[i] + frac * (hi - column[i])
        };
        let mut edges: Vec<f64> = Vec::new();
        for e in [q(0.25), q(0.5), q(0.75)] {
            if edges.last() != Some(&e) {
                edges.push(e);
            }
        }
        Bins::Edges(edges)
    }

    fn index(&self, v: f64) -> usize {
        match self {
            Bins::Levels(levels) => levels
                .iter()
                .position(|&l| l == v)
                .unwrap_or(levels.len()),
            Bins::Edges(edges) => edges.partition_point(|&e| e < v),
        }
    }

    fn label(&self, name: &str, v: f64) -> String {
        match self {
            Bins::Levels(_) => format!("{name} = {v}"),
            Bins::Edges(edges) => {
                let k = self.index(v);
                if k == 0 {
                    format!("{name} <= {:.2}", edges[0])
                } else if k == edges.len() {
                    format!("{name} > {:.2}", edges[k - 1])
                } else {
                    format!("{:.2} < {name} <= {:.2}", edges[k - 1], edges[k])
                }
            }
        }
    }
}

/// Explains one prediction with a weighted ridge fit around it.
///
/// Features are binned on `x_ref` (observed levels for categorical columns,
/// quartiles otherwise). Each perturbed sample draws every feature value from
/// a random reference row; the first sample is the instance itself. A sample
/// is weighted by `exp(−d²/width²)`, `d` being the share of features whose bin
/// differs from the instance's.
pub fn lime_explain<M: Regressor + ?Sized>(
    model: &M,
    instance: &[f64],
    x_ref: &FeatureMatrix,
    cfg: &LimeConfig,
) -> Result<LimeExplanation> {
    if cfg.n_samples < 50 {
        return Err(Error::Parameter(format!(
            "LIME needs at least 50 samples, got {}",
            cfg.n_samples
        )));
    }
    let n_feat = x_ref.n_features();
    check_width(model.n_features(), n_feat)?;
    check_width(n_feat, instance.len())?;
    if x_ref.n_rows() == 0 {
        return Err(Error::Input("LIME reference matrix is empty".into()));
    }
    let width = cfg
        .kernel_width
        .unwrap_or(0.75 * (n_feat as f64).sqrt());
    if !(width > 0.0) {
        return Err(Error::Parameter(format!("kernel width {width} must be positive")));
    }
    let bins: Vec<Bins> = (0..n_feat).map(|j| Bins::of(&mut x_ref.column(j))).collect();
    let own: Vec<usize> = (0..n_feat).map(|j| bins[j].index(instance[j])).collect();

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut indicators = Vec::with_capacity(cfg.n_samples);
    let mut responses = Vec::with_capacity(cfg.n_samples);
    let mut weights = Vec::with_capacity(cfg.n_samples);
    let mut sample = instance.to_vec();
    for s in 0..cfg.n_samples {
        if s > 0 {
            for (j, v) in sample.iter_mut().enumerate() {
                *v = x_ref.value(rng.random_range(0..x_ref.n_rows()), j);
            }
        }
        let z: Vec<f64> = (0..n_feat)
            .map(|j| if bins[j].index(sample[j]) == own[j] { 1.0 } else { 0.0 })
            .collect();
        let d = z.iter().filter(|&&v| v == 0.0).count() as f64 / n_feat as f64;
        weights.push((-(d * d) / (width * width)).exp());
        responses.push(model.predict_row(&sample));
        indicators.push(z);
    }
    if (0..n_feat).all(|j| indicators.iter().all(|z| z[j] == indicators[0][j])) {
        return Err(Error::Perturbation(
            "every perturbed sample falls in the instance's bins".into(),
        ));
    }

    let (intercept, beta) =
        weighted_ridge(&indicators, &responses, Some(&weights), cfg.ridge_lambda)?;
    let total: f64 = weights.iter().sum();
    let mean = responses.iter().zip(&weights).map(|(y, w)| y * w).sum::<f64>() / total;
    let (mut sse, mut sst) = (0.0, 0.0);
    for ((z, y), w) in indicators.iter().zip(&responses).zip(&weights) {
        let fit = intercept + z.iter().zip(&beta).map(|(a, b)| a * b).sum::<f64>();
        sse += w * (y - fit).powi(2);
        sst += w * (y - mean).powi(2);
    }
    let local_r2 = if sst > 0.0 {
        (1.0 - sse / sst).clamp(0.0, 1.0)
    } else {
        1.0
    };
    let names = x_ref.feature_names();
    Ok(LimeExplanation {
        attribution: Attribution {
            schema_version: EXPLAIN_SCHEMA_VERSION,
            base_value: intercept,
            prediction: model.predict_row(instance),
            feature_names: names.to_vec(),
            feature_values: instance.to_vec(),
            contributions: beta,
        },
        local_r2,
        labels: (0..n_feat).map(|j| bins[j].label(&names[j], instance[j])).collect(),
        kernel_width: width,
        n_samples: cfg.n_samples,
    })
}

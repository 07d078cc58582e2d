//! Global and local explanations of a fitted model: permutation importance,
//! partial dependence, ridge and tree surrogates, LIME-style local fits and
//! exact Shapley values.
//!
//! Backgrounds and substitution means should come from the training split.

mod cases;
mod importance;
mod lime;
mod pdp;
mod shap;
mod surrogate;

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::FeatureMeans;

pub use cases::{select_case_pair, CasePair};
pub use importance::{permutation_importance, ImportanceMetric, ImportanceStrategy};
pub use lime::{lime_explain, LimeConfig, LimeExplanation};
pub use pdp::{is_categorical, pdp, PdpCurve};
pub use shap::{shap_exact, SHAP_MAX_FEATURES};
pub use surrogate::{fit_surrogate_ridge, fit_surrogate_tree, LinearSurrogate, TreeSurrogate};

pub const EXPLAIN_SCHEMA_VERSION: u32 = 1;

/// Additive explanation of one prediction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Attribution {
    pub schema_version: u32,
    pub base_value: f64,
    pub prediction: f64,
    pub feature_names: Vec<String>,
    pub feature_values: Vec<f64>,
    pub contributions: Vec<f64>,
}

impl Attribution {
    pub fn contribution(&self, feature: &str) -> Option<f64> {
        self.feature_names
            .iter()
            .position(|n| n == feature)
            .map(|i| self.contributions[i])
    }

    /// `prediction − (base_value + Σ contributions)`.
    pub fn efficiency_gap(&self) -> f64 {
        self.prediction - (self.base_value + self.contributions.iter().sum::<f64>())
    }

    /// Force-plot data: a `base_value` row, one row per feature, and a
    /// `prediction` row.
    pub fn write_force_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["feature", "feature_value", "contribution"])?;
        w.write_record(["base_value", "", &self.base_value.to_string()])?;
        for i in 0..self.feature_names.len() {
            w.write_record([
                self.feature_names[i].as_str(),
                &self.feature_values[i].to_string(),
                &self.contributions[i].to_string(),
            ])?;
        }
        w.write_record(["prediction", "", &self.prediction.to_string()])?;
        w.flush()?;
        Ok(())
    }
}

/// Means for `names`, in order. Missing names are unknown features.
pub fn means_vector(names: &[String], means: &FeatureMeans) -> Result<Vec<f64>> {
    names
        .iter()
        .map(|n| {
            means
                .get(n)
                .copied()
                .ok_or_else(|| Error::UnknownFeature(n.clone()))
        })
        .collect()
}

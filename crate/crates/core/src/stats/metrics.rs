use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Regression scores. `mape` is `None` when some true value is zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub mse: f64,
    pub mae: f64,
    /// Percent.
    pub mape: Option<f64>,
    pub r2: f64,
}

/// MSE, MAE, MAPE (%) and R² about the mean of `y_true`.
///
/// When `y_true` is constant, R² is 1 for a perfect prediction and 0 otherwise.
pub fn metrics(y_true: &[f64], y_pred: &[f64]) -> Result<MetricReport> {
    if y_true.len() != y_pred.len() {
        return Err(Error::Input(format!(
            "{} true values vs {} predictions",
            y_true.len(),
            y_pred.len()
        )));
    }
    if y_true.is_empty() {
        return Err(Error::Input("cannot score an empty prediction set".into()));
    }
    let n = y_true.len() as f64;
    let mut sse = 0.0;
    let mut sae = 0.0;
    let mut sape = 0.0;
    let mut mape_defined = true;
    for (&y, &p) in y_true.iter().zip(y_pred) {
        let e = y - p;
        sse += e * e;
        sae += e.abs();
        if y == 0.0 {
            mape_defined = false;
        } else {
            sape += (e / y).abs();
        }
    }
    let mean = y_true.iter().sum::<f64>() / n;
    let sst: f64 = y_true.iter().map(|y| (y - mean).powi(2)).sum();
    let r2 = if sst > 0.0 {
        1.0 - sse / sst
    } else if sse == 0.0 {
        1.0
    } else {
        0.0
    };
    Ok(MetricReport {
        mse: sse / n,
        mae: sae / n,
        mape: mape_defined.then(|| 100.0 * sape / n),
        r2,
    })
}

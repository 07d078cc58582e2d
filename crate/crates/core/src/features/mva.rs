use crate::error::{Error, Result};

/// Arithmetic mean of a window, summed in index order.
///
/// Shared by the batch and recursive MVART paths so both produce
/// bit-identical values.
pub(crate) fn window_mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Trailing (causal) moving average. The first `window - 1` outputs average
/// over the samples available so far.
pub fn moving_average(series: &[f64], window: usize) -> Result<Vec<f64>> {
    if window == 0 {
        return Err(Error::Parameter("moving-average window must be at least 1".into()));
    }
    Ok((0..series.len())
        .map(|i| window_mean(&series[(i + 1).saturating_sub(window)..=i]))
        .collect())
}

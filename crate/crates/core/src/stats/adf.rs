//! Augmented Dickey-Fuller unit-root test, constant and no trend.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::LeastSquares;

/// Dickey-Fuller critical values for the regression with a constant and no
/// trend, by sample size (Fuller 1976, as tabulated by Hamilton, Table B.6).
const SAMPLE_SIZES: [f64; 6] = [25.0, 50.0, 100.0, 250.0, 500.0, f64::INFINITY];
const CRITICAL_TABLE: [(f64, [f64; 6]); 4] = [
    (0.01, [-3.75, -3.58, -3.51, -3.46, -3.44, -3.43]),
    (0.025, [-3.33, -3.22, -3.17, -3.14, -3.13, -3.12]),
    (0.05, [-3.00, -2.93, -2.89, -2.88, -2.87, -2.86]),
    (0.10, [-2.63, -2.60, -2.58, -2.57, -2.57, -2.57]),
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdfResult {
    /// t-statistic of the lagged level coefficient.
    pub statistic: f64,
    pub used_lags: usize,
    /// Observations in the final regression.
    pub n_obs: usize,
    /// Interpolated critical values keyed by level ("1%", "5%", "10%").
    pub critical_values: BTreeMap<String, f64>,
    /// Whether the unit-root null is rejected at each level.
    pub reject_at: BTreeMap<String, bool>,
    /// Interval of significance levels containing the p-value.
    pub p_bracket: (f64, f64),
}

impl AdfResult {
    pub fn rejects(&self, level: &str) -> bool {
        self.reject_at.get(level).copied().unwrap_or(false)
    }
}

/// Default maximum lag: ⌊12·(n/100)^¼⌋.
pub fn schwert_max_lags(n: usize) -> usize {
    (12.0 * (n as f64 / 100.0).powf(0.25)).floor() as usize
}

fn interpolate(values: &[f64; 6], n_obs: usize) -> f64 {
    let n = n_obs as f64;
    if n <= SAMPLE_SIZES[0] {
        return values[0];
    }
    let inv = 1.0 / n;
    for k in 0..5 {
        let (lo, hi) = (SAMPLE_SIZES[k], SAMPLE_SIZES[k + 1]);
        if n >= lo && n <= hi {
            let (a, b) = (1.0 / lo, 1.0 / hi);
            let w = (a - inv) / (a - b);
            return values[k] + w * (values[k + 1] - values[k]);
        }
    }
    values[5]
}

fn level_label(level: f64) -> String {
    let pct = level * 100.0;
    if pct.fract() == 0.0 {
        format!("{pct:.0}%")
    } else {
        format!("{pct}%")
    }
}

struct Regression {
    stat: f64,
    ssr: f64,
    n_obs: usize,
}

fn regress(y: &[f64], lags: usize, first: usize) -> Result<Regression> {
    // Δy_t = α + β·y_{t-1} + Σ γ_i·Δy_{t-i},   t = first..n-1, first ≥ lags + 1
    let dy = |t: usize| y[t] - y[t - 1];
    let rows: Vec<Vec<f64>> = (first..y.len())
        .map(|t| {
            let mut r = Vec::with_capacity(lags + 2);
            r.push(1.0);
            r.push(y[t - 1]);
            r.extend((1..=lags).map(|i| dy(t - i)));
            r
        })
        .collect();
    let resp: Vec<f64> = (first..y.len()).map(dy).collect();
    let fit = LeastSquares::fit(rows.iter().map(Vec::as_slice), &resp)
        .map_err(|e| Error::Numeric(format!("ADF regression with {lags} lags: {e}")))?;
    let se = fit.standard_errors()[1];
    if !(se > 0.0) {
        return Err(Error::Numeric("ADF regression has a perfect fit".into()));
    }
    Ok(Regression {
        stat: fit.coefficients[1] / se,
        ssr: fit.residual_sum_squares,
        n_obs: fit.n_obs,
    })
}

/// Runs the test with the lag order chosen by AIC over `0..=max_lags`
/// (default: [`schwert_max_lags`]).
pub fn adf_test(series: &[f64], max_lags: Option<usize>) -> Result<AdfResult> {
    let max_lags = max_lags.unwrap_or_else(|| schwert_max_lags(series.len()));
    if series.len() < 25 + max_lags {
        return Err(Error::Parameter(format!(
            "ADF test needs at least {} observations, got {}",
            25 + max_lags,
            series.len()
        )));
    }
    // All candidate orders are compared on the same sample.
    let mut best: Option<(f64, usize)> = None;
    for p in 0..=max_lags {
        let r = regress(series, p, max_lags + 1)?;
        let n = r.n_obs as f64;
        let aic = n * (r.ssr / n).ln() + 2.0 * (p + 2) as f64;
        if best.is_none_or(|(b, _)| aic < b) {
            best = Some((aic, p));
        }
    }
    let used_lags = best.map(|b| b.1).unwrap_or(0);
    let fit = regress(series, used_lags, used_lags + 1)?;

    let mut critical_values = BTreeMap::new();
    let mut reject_at = BTreeMap::new();
    let mut p_bracket = None;
    let mut lower = 0.0;
    for (level, row) in CRITICAL_TABLE {
        let cv = interpolate(&row, fit.n_obs);
        if fit.stat < cv && p_bracket.is_none() {
            p_bracket = Some((lower, level));
        }
        lower = level;
        if level != 0.025 {
            critical_values.insert(level_label(level), cv);
            reject_at.insert(level_label(level), fit.stat < cv);
        }
    }
    let p_bracket = p_bracket.unwrap_or((lower, 1.0));
    Ok(AdfResult {
        statistic: fit.stat,
        used_lags,
        n_obs: fit.n_obs,
        critical_values,
        reject_at,
        p_bracket,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::testing::{ar1, random_walk};

    #[test]
    fn random_walk_is_not_rejected() {
        let walk = random_walk(42, 2000);
        let r = adf_test(&walk, None).unwrap();
        assert!(!r.rejects("5%"), "statistic {}", r.statistic);
    }

    #[test]
    fn differenced_walk_is_stationary() {
        let walk = random_walk(42, 2000);
        let diff: Vec<f64> = walk.windows(2).map(|w| w[1] - w[0]).collect();
        let r = adf_test(&diff, None).unwrap();
        assert!(r.rejects("1%"), "statistic {}", r.statistic);
        assert_eq!(r.p_bracket, (0.0, 0.01));
    }

    #[test]
    fn stationary_ar1_is_rejected() {
        let r = adf_test(&ar1(5, 2000, 0.5), None).unwrap();
        assert!(r.rejects("1%"), "statistic {}", r.statistic);
    }

    #[test]
    fn rejections_are_monotone_and_bracket_consistent() {
        for seed in 0..20 {
            let x = ar1(seed, 300, 0.9);
            let r = adf_test(&x, Some(4)).unwrap();
            if r.rejects("1%") {
                assert!(r.rejects("5%"));
            }
            if r.rejects("5%") {
                assert!(r.rejects("10%"));
                assert!(r.p_bracket.1 <= 0.05);
            } else {
                assert!(r.p_bracket.0 >= 0.025);
            }
        }
    }

    #[test]
    fn shift_invariant_statistic() {
        let x = random_walk(9, 400);
        let shifted: Vec<f64> = x.iter().map(|v| v + 1000.0).collect();
        let a = adf_test(&x, Some(5)).unwrap();
        let b = adf_test(&shifted, Some(5)).unwrap();
        assert_eq!(a.used_lags, b.used_lags);
        assert!((a.statistic - b.statistic).abs() < 1e-6 * a.statistic.abs().max(1.0));
    }

    #[test]
    fn critical_values_interpolate_between_table_rows() {
        let row = CRITICAL_TABLE[2].1;
        assert_eq!(interpolate(&row, 25), -3.00);
        assert_eq!(interpolate(&row, 10), -3.00);
        assert!((interpolate(&row, 100) - -2.89).abs() < 1e-12);
        let mid = interpolate(&row, 5000);
        assert!(mid < -2.86 && mid > -2.87);
    }

    #[test]
    fn too_short_series_is_rejected() {
        assert!(adf_test(&[1.0; 20], Some(2)).is_err());
    }
}

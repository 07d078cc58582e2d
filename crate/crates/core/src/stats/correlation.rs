use crate::error::{Error, Result};

fn check(series: &[f64], max_lag: usize) -> Result<()> {
    if series.len() <= max_lag {
        return Err(Error::Parameter(format!(
            "series of length {} is too short for lag {max_lag}",
            series.len()
        )));
    }
    Ok(())
}

/// Sample autocorrelation for lags `0..=max_lag`, normalized by the lag-0
/// autocovariance.
pub fn acf(series: &[f64], max_lag: usize) -> Result<Vec<f64>> {
    check(series, max_lag)?;
    let n = series.len() as f64;
    let mean = series.iter().sum::<f64>() / n;
    let centered: Vec<f64> = series.iter().map(|x| x - mean).collect();
    let c0: f64 = centered.iter().map(|x| x * x).sum();
    if !(c0 > 0.0) {
        return Err(Error::Degenerate("series has zero variance".into()));
    }
    let mut out = Vec::with_capacity(max_lag + 1);
    out.push(1.0);
    for k in 1..=max_lag {
        let ck: f64 = centered[k..]
            .iter()
            .zip(&centered)
            .map(|(a, b)| a * b)
            .sum();
        out.push(ck / c0);
    }
    Ok(out)
}

/// Partial autocorrelation for lags `0..=max_lag` via the Durbin-Levinson
/// recursion on the sample autocorrelations.
pub fn pacf(series: &[f64], max_lag: usize) -> Result<Vec<f64>> {
    let rho = acf(series, max_lag)?;
    let mut out = vec![1.0];
    // phi[j] holds the AR(k) coefficients of the current order.
    let mut phi: Vec<f64> = Vec::with_capacity(max_lag);
    for k in 1..=max_lag {
        let num = rho[k] - (1..k).map(|j| phi[j - 1] * rho[k - j]).sum::<f64>();
        let den = 1.0 - (1..k).map(|j| phi[j - 1] * rho[j]).sum::<f64>();
        if den.abs() < 1e-300 {
            return Err(Error::Numeric(format!(
                "Durbin-Levinson recursion broke down at lag {k}"
            )));
        }
        let phi_kk = num / den;
        let prev = phi.clone();
        for j in 1..k {
            phi[j - 1] = prev[j - 1] - phi_kk * prev[k - j - 1];
        }
        phi.push(phi_kk);
        out.push(phi_kk);
    }
    Ok(out)
}

use crate::error::{Error, Result};

/// Counts per bin, for bins `[k·w, (k+1)·w)` labelled by their anchor `k·w`.
/// Every bin between the lowest and highest occupied one is reported,
/// including empty ones.
pub fn histogram(series: &[f64], bin_width: f64) -> Result<Vec<(f64, usize)>> {
    if !(bin_width > 0.0) {
        return Err(Error::Parameter("bin width must be positive".into()));
    }
    if series.is_empty() {
        return Ok(Vec::new());
    }
    let index = |x: f64| (x / bin_width).floor() as i64;
    let (lo, hi) = series.iter().fold((i64::MAX, i64::MIN), |(lo, hi), &x| {
        let k = index(x);
        (lo.min(k), hi.max(k))
    });
    let mut counts = vec![0usize; (hi - lo + 1) as usize];
    for &x in series {
        counts[(index(x) - lo) as usize] += 1;
    }
    Ok(counts
        .into_iter()
        .enumerate()
        .map(|(i, c)| ((lo + i as i64) as f64 * bin_width, c))
        .collect())
}

/// Inverse standard-normal CDF (Acklam's rational approximation, relative
/// error below 1.2e-9).
pub fn inverse_normal_cdf(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.383577518672690e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    const P_LOW: f64 = 0.02425;

    if p <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if p >= 1.0 {
        return f64::INFINITY;
    }
    let tail = |q: f64| {
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    };
    if p < P_LOW {
        tail((-2.0 * p.ln()).sqrt())
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        -tail((-2.0 * (1.0 - p).ln()).sqrt())
    }
}

/// Normal Q-Q pairs `(theoretical, sample)` with the sample sorted ascending
/// and theoretical quantiles `mean + sd·Φ⁻¹((i - 0.5)/n)`.
pub fn qq_normal(residuals: &[f64]) -> Result<Vec<(f64, f64)>> {
    let n = residuals.len();
    if n < 3 {
        return Err(Error::Parameter("Q-Q plot needs at least 3 values".into()));
    }
    let mean = residuals.iter().sum::<f64>() / n as f64;
    let var = residuals.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    if !(var > 0.0) {
        return Err(Error::Degenerate("residuals have zero variance".into()));
    }
    let sd = var.sqrt();
    let mut sorted = residuals.to_vec();
    sorted.sort_by(f64::total_cmp);
    // Upper half mirrors the lower half so the quantiles are exactly
    // antisymmetric about the median rank.
    let z: Vec<f64> = (1..=n)
        .map(|i| {
            let mirror = n + 1 - i;
            if i <= mirror {
                inverse_normal_cdf((i as f64 - 0.5) / n as f64)
            } else {
                -inverse_normal_cdf((mirror as f64 - 0.5) / n as f64)
            }
        })
        .collect();
    Ok(z.into_iter()
        .zip(sorted)
        .map(|(z, s)| (mean + sd * z, s))
        .collect())
}

//! Small dense symmetric solvers used by the least-squares fits
//! (ADF regression, ridge surrogates, LIME).

use crate::error::{Error, Result};

/// Neumaier-compensated running sum.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct CompensatedSum {
    sum: f64,
    c: f64,
}

impl CompensatedSum {
    pub(crate) fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.c += (self.sum - t) + v;
        } else {
            self.c += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.c
    }
}

/// Row-major square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SquareMatrix {
    pub fn zeros(n: usize) -> Self {
        SquareMatrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] += v;
    }
}

/// Lower-triangular Cholesky factor of a symmetric positive-definite matrix.
#[derive(Debug, Clone)]
pub struct Cholesky {
    l: SquareMatrix,
}

impl Cholesky {
    pub fn factor(a: &SquareMatrix) -> Result<Self> {
        let n = a.dim();
        let mut l = SquareMatrix::zeros(n);
        // Pivots below this fraction of the largest diagonal entry are treated
        // as rank deficiency rather than ill conditioning.
        let scale = (0..n).map(|i| a.get(i, i).abs()).fold(0.0, f64::max);
        let tol = scale * 1e-13;
        for j in 0..n {
            let mut d = a.get(j, j);
            for k in 0..j {
                d -= l.get(j, k) * l.get(j, k);
            }
            if !(d > tol) {
                return Err(Error::Numeric(format!(
                    "matrix is singular or not positive definite (pivot {j} = {d:e})"
                )));
            }
            let d = d.sqrt();
            l.set(j, j, d);
            for i in j + 1..n {
                let mut s = a.get(i, j);
                for k in 0..j {
                    s -= l.get(i, k) * l.get(j, k);
                }
                l.set(i, j, s / d);
            }
        }
        Ok(Cholesky { l })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.l.dim();
        assert_eq!(b.len(), n, "right-hand side length mismatch");
        let mut y = vec![0.0; n];
        for i in 0..n {
            let mut s = b[i];
            for k in 0..i {
                s -= self.l.get(i, k) * y[k];
            }
            y[i] = s / self.l.get(i, i);
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in i + 1..n {
                s -= self.l.get(k, i) * x[k];
            }
            x[i] = s / self.l.get(i, i);
        }
        x
    }

    /// Diagonal of the inverse matrix.
    pub fn inverse_diagonal(&self) -> Vec<f64> {
        let n = self.l.dim();
        (0..n)
            .map(|i| {
                let mut e = vec![0.0; n];
                e[i] = 1.0;
                self.solve(&e)[i]
            })
            .collect()
    }
}

/// Ordinary least squares via the normal equations. `rows` are the design
/// rows (each of equal width), `y` the response.
#[derive(Debug, Clone)]
pub struct LeastSquares {
    pub coefficients: Vec<f64>,
    pub residual_sum_squares: f64,
    pub n_obs: usize,
    factor: Cholesky,
}

impl LeastSquares {
    pub fn fit<'a>(rows: impl Iterator<Item = &'a [f64]> + Clone, y: &[f64]) -> Result<Self> {
        let width = rows
            .clone()
            .next()
            .map(|r| r.len())
            .ok_or_else(|| Error::Numeric("empty regression".into()))?;
        let mut xtx = SquareMatrix::zeros(width);
        let mut xty = vec![0.0; width];
        let mut n_obs = 0;
        for (row, &yi) in rows.clone().zip(y) {
            for i in 0..width {
                xty[i] += row[i] * yi;
                for j in 0..=i {
                    xtx.add(i, j, row[i] * row[j]);
                }
            }
            n_obs += 1;
        }
        for i in 0..width {
            for j in 0..i {
                let v = xtx.get(i, j);
                xtx.set(j, i, v);
            }
        }
        let factor = Cholesky::factor(&xtx)?;
        let coefficients = factor.solve(&xty);
        let residual_sum_squares = rows
            .zip(y)
            .map(|(row, &yi)| {
                let fit: f64 = row.iter().zip(&coefficients).map(|(a, b)| a * b).sum();
                (yi - fit).powi(2)
            })
            .sum();
        Ok(LeastSquares {
            coefficients,
            residual_sum_squares,
            n_obs,
            factor,
        })
    }

    /// Standard errors of the coefficients under homoskedastic errors.
    pub fn standard_errors(&self) -> Vec<f64> {
        let dof = self.n_obs.saturating_sub(self.coefficients.len()).max(1) as f64;
        let sigma2 = self.residual_sum_squares / dof;
        self.factor
            .inverse_diagonal()
            .into_iter()
            .map(|d| (sigma2 * d).sqrt())
            .collect()
    }
}

/// Ridge fit with an unpenalized intercept: minimizes
/// `Σ wᵢ (yᵢ − a − xᵢ·β)² + λ‖β‖²`. Returns `(a, β)`.
///
/// Unit weights are used when `weights` is `None`.
pub fn weighted_ridge(
    rows: &[Vec<f64>],
    y: &[f64],
    weights: Option<&[f64]>,
    lambda: f64,
) -> Result<(f64, Vec<f64>)> {
    let width = rows
        .first()
        .map(Vec::len)
        .ok_or_else(|| Error::Numeric("empty regression".into()))?;
    let w = |i: usize| weights.map_or(1.0, |w| w[i]);
    let total: f64 = (0..rows.len()).map(w).sum();
    if !(total > 0.0) {
        return Err(Error::Numeric("regression weights sum to zero".into()));
    }
    let mut mx = vec![0.0; width];
    let mut my = 0.0;
    for (i, (row, &yi)) in rows.iter().zip(y).enumerate() {
        for (m, v) in mx.iter_mut().zip(row) {
            *m += w(i) * v;
        }
        my += w(i) * yi;
    }
    mx.iter_mut().for_each(|m| *m /= total);
    my /= total;

    let mut a = SquareMatrix::zeros(width);
    let mut b = vec![0.0; width];
    let mut centered = vec![0.0; width];
    for (i, (row, &yi)) in rows.iter().zip(y).enumerate() {
        for j in 0..width {
            centered[j] = row[j] - mx[j];
        }
        let (wi, yc) = (w(i), yi - my);
        for j in 0..width {
            b[j] += wi * centered[j] * yc;
            for k in 0..=j {
                a.add(j, k, wi * centered[j] * centered[k]);
            }
        }
    }
    for j in 0..width {
        a.add(j, j, lambda);
        for k in 0..j {
            let v = a.get(j, k);
            a.set(k, j, v);
        }
    }
    let beta = Cholesky::factor(&a)?.solve(&b);
    let intercept = my - beta.iter().zip(&mx).map(|(b, m)| b * m).sum::<f64>();
    Ok((intercept, beta))
}

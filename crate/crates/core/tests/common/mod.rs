//! Independent reference implementations used as test oracles. None of them
//! shares code with the library: they enumerate, sum and solve directly.
#![allow(dead_code)]

use num_complex::Complex64;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use roomcast::features::FeatureMatrix;
use roomcast::gbm::{Regressor, TreeNode};

/// Tree produced by exhaustive split enumeration.
#[derive(Debug, Clone, PartialEq)]
pub enum RefTree {
    Leaf(f64),
    Split {
        feature: usize,
        threshold: f64,
        left: Box<RefTree>,
        right: Box<RefTree>,
    },
}

/// Grows a squared-loss tree (unit hessians) by trying every feature and
/// every cut between consecutive distinct values, summing gradients over
/// each candidate partition from scratch.
///
/// Ties keep the earliest candidate in (feature, threshold) order.
pub fn brute_force_tree(
    rows: &[Vec<f64>],
    grad: &[f64],
    idx: &[usize],
    depth_left: usize,
    lambda: f64,
    gamma: f64,
) -> RefTree {
    let sum = |set: &[usize]| set.iter().map(|&i| grad[i]).sum::<f64>();
    let leaf = |set: &[usize]| RefTree::Leaf(-sum(set) / (set.len() as f64 + lambda));
    if depth_left == 0 {
        return leaf(idx);
    }
    let score = |set: &[usize]| {
        let g = sum(set);
        g * g / (set.len() as f64 + lambda)
    };
    let parent = score(idx);
    let mut best: Option<(f64, usize, f64)> = None;
    for f in 0..rows[0].len() {
        let mut values: Vec<f64> = idx.iter().map(|&i| rows[i][f]).collect();
        values.sort_by(f64::total_cmp);
        values.dedup();
        for w in values.windows(2) {
            let mid = w[0] + (w[1] - w[0]) / 2.0;
            let thr = if mid > w[0] { mid } else { w[1] };
            let (l, r): (Vec<usize>, Vec<usize>) = idx.iter().partition(|&&i| rows[i][f] < thr);
            let gain = 0.5 * (score(&l) + score(&r) - parent) - gamma;
            if gain > 0.0 && best.is_none_or(|b| gain > b.0) {
                best = Some((gain, f, thr));
            }
        }
    }
    match best {
        None => leaf(idx),
        Some((_, f, thr)) => {
            let (l, r): (Vec<usize>, Vec<usize>) = idx.iter().partition(|&&i| rows[i][f] < thr);
            RefTree::Split {
                feature: f,
                threshold: thr,
                left: Box::new(brute_force_tree(rows, grad, &l, depth_left - 1, lambda, gamma)),
                right: Box::new(brute_force_tree(rows, grad, &r, depth_left - 1, lambda, gamma)),
            }
        }
    }
}

/// Structural equality with leaf weights compared to `tol`.
pub fn same_tree(got: &TreeNode, want: &RefTree, tol: f64) -> Result<(), String> {
    match (got, want) {
        (TreeNode::Leaf { weight }, RefTree::Leaf(w)) => {
            if (weight - w).abs() <= tol {
                Ok(())
            } else {
                Err(format!("leaf {weight} vs {w}"))
            }
        }
        (
            TreeNode::Branch {
                feature,
                threshold,
                left,
                right,
                ..
            },
            RefTree::Split {
                feature: f,
                threshold: t,
                left: l,
                right: r,
            },
        ) => {
            if feature != f || threshold != t {
                return Err(format!("split ({feature}, {threshold}) vs ({f}, {t})"));
            }
            same_tree(left, l, tol)?;
            same_tree(right, r, tol)
        }
        _ => Err(format!("shape differs: {got:?} vs {want:?}")),
    }
}

/// Random design with values on a coarse grid so that duplicate values and
/// equal-valued cuts occur.
pub fn random_fixture(seed: u64, n: usize, p: usize) -> (Vec<Vec<f64>>, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..p).map(|_| (rng.random_range(0.0f64..10.0) * 4.0).round() / 4.0).collect())
        .collect();
    let y = rows
        .iter()
        .map(|r| 20.0 + r[0] * 0.7 - r[p - 1] * 0.3 + rng.random_range(-1.0..1.0))
        .collect();
    (rows, y)
}

pub fn matrix(rows: &[Vec<f64>], y: &[f64]) -> FeatureMatrix {
    let names = (0..rows[0].len()).map(|j| format!("x{j}")).collect();
    FeatureMatrix::from_rows(names, rows, y.to_vec()).unwrap()
}

/// Solves `A x = b` by Gaussian elimination with partial pivoting.
pub fn gauss_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|k| a[i][k] * x[k]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    x
}

/// Ridge with an unpenalized intercept via the full normal equations
/// `[1 X]ᵀ[1 X] + diag(0, λ, …, λ)`. Returns `(intercept, slopes)`.
pub fn ridge_oracle(rows: &[Vec<f64>], y: &[f64], lambda: f64) -> (f64, Vec<f64>) {
    let p = rows[0].len() + 1;
    let design: Vec<Vec<f64>> = rows
        .iter()
        .map(|r| std::iter::once(1.0).chain(r.iter().copied()).collect())
        .collect();
    let mut a = vec![vec![0.0; p]; p];
    let mut b = vec![0.0; p];
    for (d, &yi) in design.iter().zip(y) {
        for i in 0..p {
            b[i] += d[i] * yi;
            for j in 0..p {
                a[i][j] += d[i] * d[j];
            }
        }
    }
    for (i, row) in a.iter_mut().enumerate().skip(1) {
        row[i] += lambda;
    }
    let x = gauss_solve(a, b);
    (x[0], x[1..].to_vec())
}

/// Population-standardized copy of `rows`.
pub fn standardize(rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = rows.len() as f64;
    let p = rows[0].len();
    let mean: Vec<f64> = (0..p).map(|j| rows.iter().map(|r| r[j]).sum::<f64>() / n).collect();
    let sd: Vec<f64> = (0..p)
        .map(|j| (rows.iter().map(|r| (r[j] - mean[j]).powi(2)).sum::<f64>() / n).sqrt())
        .collect();
    rows.iter()
        .map(|r| (0..p).map(|j| (r[j] - mean[j]) / sd[j]).collect())
        .collect()
}

/// O(N²) discrete Fourier transform `F_k = Σ x_t e^{-2πikt/N}`.
pub fn naive_dft(x: &[Complex64]) -> Vec<Complex64> {
    let n = x.len();
    (0..n)
        .map(|k| {
            x.iter()
                .enumerate()
                .map(|(t, v)| {
                    let angle = -2.0 * std::f64::consts::PI * ((k * t) % n) as f64 / n as f64;
                    v * Complex64::from_polar(1.0, angle)
                })
                .sum()
        })
        .collect()
}

/// Black box defined by a closure.
pub struct FnModel<F: Fn(&[f64]) -> f64 + Sync> {
    pub width: usize,
    pub f: F,
}

impl<F: Fn(&[f64]) -> f64 + Sync> Regressor for FnModel<F> {
    fn n_features(&self) -> usize {
        self.width
    }

    fn predict_row(&self, row: &[f64]) -> f64 {
        (self.f)(row)
    }
}

pub fn rel_err(got: f64, want: f64) -> f64 {
    (got - want).abs() / want.abs().max(1e-300)
}

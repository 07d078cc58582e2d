//! Diagnostics: autocorrelation, partial autocorrelation, the ADF unit-root
//! test, histograms, normal Q-Q pairs and regression metrics.

mod adf;
mod correlation;
mod distribution;
mod metrics;

pub use adf::{adf_test, schwert_max_lags, AdfResult};
pub use correlation::{acf, pacf};
pub use distribution::{histogram, inverse_normal_cdf, qq_normal};
pub use metrics::{metrics, MetricReport};

/// Seeded reference processes for tests and examples.
pub mod testing {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    pub fn white_noise(seed: u64, n: usize) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
    }

    /// AR(1) with unit innovations, started from zero.
    pub fn ar1(seed: u64, n: usize, phi: f64) -> Vec<f64> {
        let mut x = 0.0;
        white_noise(seed, n)
            .into_iter()
            .map(|e| {
                x = phi * x + e;
                x
            })
            .collect()
    }

    /// Cumulative sum of standard-normal steps.
    pub fn random_walk(seed: u64, n: usize) -> Vec<f64> {
        ar1(seed, n, 1.0)
    }
}

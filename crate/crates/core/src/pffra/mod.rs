//! Permutation feature-based frequency response analysis: compare spectra of
//! the model's predictions when a feature, or everything but that feature, is
//! replaced by its training mean.

mod fft;
mod spectrum;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use fft::fft;
pub use spectrum::{band_energy, default_bands, dft, dft_windowed, Band, Spectrum, Window};

use crate::dataio::TimeTable;
use crate::error::{Error, Result};
use crate::explain::means_vector;
use crate::features::{FeatureMatrix, FeatureMeans};
use crate::forecast::{rolling_forecast_substituted, ForecastConfig};
use crate::gbm::{check_width, Regressor};

pub const PFFRA_SCHEMA_VERSION: u32 = 1;

/// Copy of `x` with the named columns replaced by their means.
pub fn mean_substitute(x: &FeatureMatrix, features: &[String], means: &FeatureMeans) -> Result<FeatureMatrix> {
    let mut out = x.clone();
    for name in features {
        let j = x.feature_index(name)?;
        let mu = *means
            .get(name)
            .ok_or_else(|| Error::UnknownFeature(name.clone()))?;
        for i in 0..out.n_rows() {
            out.set_value(i, j, mu);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandEnergies {
    pub feature_only: f64,
    pub feature_permuted: f64,
    pub original: f64,
    pub truth: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PffraReport {
    pub schema_version: u32,
    pub feature: String,
    /// `static` (design matrix) or `rolling` (recursive forecast).
    pub mode: String,
    /// Predictions with only `feature` kept, everything else at its mean.
    pub spectrum_feature_only: Spectrum,
    /// Predictions with `feature` at its mean.
    pub spectrum_feature_permuted: Spectrum,
    pub spectrum_original: Spectrum,
    pub spectrum_truth: Spectrum,
    pub band_energies: BTreeMap<String, BandEnergies>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PffraOptions {
    pub bands: Vec<Band>,
    pub window: Window,
}

impl Default for PffraOptions {
    fn default() -> Self {
        PffraOptions {
            bands: default_bands(),
            window: Window::Rectangular,
        }
    }
}

fn sample_interval(timestamps: &[chrono::DateTime<chrono::Utc>]) -> Result<f64> {
    if timestamps.len() < 2 {
        return Err(Error::Input("spectrum needs at least 2 samples".into()));
    }
    let dt = (timestamps[1] - timestamps[0]).num_seconds();
    if dt <= 0 || timestamps.windows(2).any(|w| (w[1] - w[0]).num_seconds() != dt) {
        return Err(Error::Input(
            "rows must be contiguous and evenly spaced for spectral analysis".into(),
        ));
    }
    Ok(dt as f64)
}

fn report(
    feature: &str,
    mode: &str,
    series: [&[f64]; 4],
    dt: f64,
    opts: &PffraOptions,
) -> Result<PffraReport> {
    let [only, permuted, original, truth] =
        series.map(|s| dft_windowed(s, dt, opts.window));
    let (only, permuted, original, truth) = (only?, permuted?, original?, truth?);
    let e = [&only, &permuted, &original, &truth]
        .map(|s| band_energy(s, &opts.bands));
    let [e0, e1, e2, e3] = e;
    let (e0, e1, e2, e3) = (e0?, e1?, e2?, e3?);
    let band_energies = opts
        .bands
        .iter()
        .map(|b| {
            let k = &b.name;
            (
                k.clone(),
                BandEnergies {
                    feature_only: e0[k],
                    feature_permuted: e1[k],
                    original: e2[k],
                    truth: e3[k],
                },
            )
        })
        .collect();
    Ok(PffraReport {
        schema_version: PFFRA_SCHEMA_VERSION,
        feature: feature.to_string(),
        mode: mode.to_string(),
        spectrum_feature_only: only,
        spectrum_feature_permuted: permuted,
        spectrum_original: original,
        spectrum_truth: truth,
        band_energies,
    })
}

/// Analysis on a design matrix whose rows are consecutive instants.
pub fn pffra<M: Regressor + ?Sized>(
    model: &M,
    x: &FeatureMatrix,
    feature: &str,
    means: &FeatureMeans,
    opts: &PffraOptions,
) -> Result<PffraReport> {
    check_width(model.n_features(), x.n_features())?;
    x.feature_index(feature)?;
    let dt = sample_interval(x.timestamps())?;
    let others: Vec<String> = x
        .feature_names()
        .iter()
        .filter(|n| *n != feature)
        .cloned()
        .collect();
    let only = model.predict_matrix(&mean_substitute(x, &others, means)?)?;
    let permuted = model.predict_matrix(&mean_substitute(x, &[feature.to_string()], means)?)?;
    let original = model.predict_matrix(x)?;
    report(feature, "static", [&only, &permuted, &original, x.target()], dt, opts)
}

/// Analysis under the rolling forecast, with substitution applied to the
/// model's inputs while MVART still carries self-predictions. Every step
/// must be scored, so the horizon has to equal the access interval.
#[allow(clippy::too_many_arguments)]
pub fn pffra_rolling<M: Regressor + ?Sized>(
    model: &M,
    context: &TimeTable,
    names: &[String],
    window: usize,
    forecast: &ForecastConfig,
    feature: &str,
    means: &FeatureMeans,
    opts: &PffraOptions,
) -> Result<PffraReport> {
    if forecast.horizon != forecast.access_interval {
        return Err(Error::Config(
            "rolling analysis needs horizon equal to the access interval".into(),
        ));
    }
    let m = names
        .iter()
        .position(|n| n == feature)
        .ok_or_else(|| Error::UnknownFeature(feature.to_string()))?;
    let mu = means_vector(names, means)?;
    let others: Vec<(usize, f64)> = (0..names.len()).filter(|&j| j != m).map(|j| (j, mu[j])).collect();
    let run = |subs: &[(usize, f64)]| rolling_forecast_substituted(model, context, names, window, forecast, subs);
    let only = run(&others)?;
    let permuted = run(&[(m, mu[m])])?;
    let original = run(&[])?;
    let dt = sample_interval(&original.timestamps)?;
    report(
        feature,
        "rolling",
        [&only.y_pred, &permuted.y_pred, &original.y_pred, &original.y_true],
        dt,
        opts,
    )
}

impl PffraReport {
    /// Share of the original prediction's energy in `band` that the
    /// feature-only variant carries.
    pub fn feature_only_share(&self, band: &str) -> Option<f64> {
        self.band_energies
            .get(band)
            .map(|e| e.feature_only / e.original)
    }
}

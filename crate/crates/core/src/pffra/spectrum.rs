use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::fft::fft;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Window {
    #[default]
    Rectangular,
    /// Hann taper on the demeaned series, amplitudes corrected by the
    /// window's mean. Parseval does not hold for tapered spectra.
    Hann,
}

/// One-sided amplitude spectrum.
///
/// `magnitudes[k]` is the amplitude of a cosine at `frequencies[k]`:
/// `2|F_k|/N`, except `|F_k|/N` for the Nyquist bin of an even-length
/// series. `dc` is the series mean.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    /// Cycles per hour, bins 1..=⌊N/2⌋.
    pub frequencies: Vec<f64>,
    pub magnitudes: Vec<f64>,
    pub dc: f64,
    pub n: usize,
    /// Seconds between samples.
    pub sample_interval: f64,
    pub window: Window,
}

impl Spectrum {
    fn has_nyquist_bin(&self) -> bool {
        self.n % 2 == 0
    }

    /// Mean-square contribution of non-DC bin `k` (index into `magnitudes`).
    fn bin_power(&self, k: usize) -> f64 {
        let a = self.magnitudes[k];
        if self.has_nyquist_bin() && k + 1 == self.magnitudes.len() {
            a * a
        } else {
            a * a / 2.0
        }
    }

    /// Mean of the squared series reconstructed from the spectrum.
    pub fn total_power(&self) -> f64 {
        self.dc * self.dc + (0..self.magnitudes.len()).map(|k| self.bin_power(k)).sum::<f64>()
    }

    pub fn nyquist(&self) -> f64 {
        1800.0 / self.sample_interval
    }

    /// CSV `frequency, magnitude` with the DC term as the first row.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["frequency", "magnitude"])?;
        w.write_record(["0".to_string(), self.dc.to_string()])?;
        for (f, m) in self.frequencies.iter().zip(&self.magnitudes) {
            w.write_record([f.to_string(), m.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Spectrum of a series sampled every `sample_interval` seconds.
pub fn dft(series: &[f64], sample_interval: f64) -> Result<Spectrum> {
    dft_windowed(series, sample_interval, Window::Rectangular)
}

pub fn dft_windowed(series: &[f64], sample_interval: f64, window: Window) -> Result<Spectrum> {
    let n = series.len();
    if n < 2 {
        return Err(Error::Input(format!("spectrum needs at least 2 samples, got {n}")));
    }
    if !(sample_interval > 0.0) {
        return Err(Error::Parameter("sample interval must be positive".into()));
    }
    if series.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numeric("series contains non-finite values".into()));
    }
    let mean = series.iter().sum::<f64>() / n as f64;
    let (input, gain): (Vec<Complex64>, f64) = match window {
        Window::Rectangular => (series.iter().map(|&v| Complex64::new(v, 0.0)).collect(), 1.0),
        Window::Hann => {
            let w: Vec<f64> = (0..n)
                .map(|i| 0.5 - 0.5 * (2.0 * PI * i as f64 / n as f64).cos())
                .collect();
            let gain = w.iter().sum::<f64>() / n as f64;
            let input = series
                .iter()
                .zip(&w)
                .map(|(v, w)| Complex64::new((v - mean) * w, 0.0))
                .collect();
            (input, gain)
        }
    };
    let f = fft(&input);
    let half = n / 2;
    let hz_to_cph = 3600.0;
    let frequencies = (1..=half)
        .map(|k| k as f64 / (n as f64 * sample_interval) * hz_to_cph)
        .collect();
    let magnitudes = (1..=half)
        .map(|k| {
            let scale = if n % 2 == 0 && k == half { 1.0 } else { 2.0 };
            scale * f[k].norm() / (n as f64 * gain)
        })
        .collect();
    Ok(Spectrum {
        frequencies,
        magnitudes,
        dc: mean,
        n,
        sample_interval,
        window,
    })
}

/// A frequency interval in cycles per hour. The upper bound is inclusive;
/// the lower bound is inclusive unless `lower_open`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Band {
    pub name: String,
    pub lo: f64,
    pub hi: f64,
    pub lower_open: bool,
}

impl Band {
    pub fn closed(name: &str, lo: f64, hi: f64) -> Band {
        Band { name: name.into(), lo, hi, lower_open: false }
    }

    pub fn open_closed(name: &str, lo: f64, hi: f64) -> Band {
        Band { name: name.into(), lo, hi, lower_open: true }
    }

    fn contains(&self, f: f64) -> bool {
        let above = if self.lower_open { f > self.lo } else { f >= self.lo };
        above && f <= self.hi
    }
}

/// `dc` = [0, 0], `low` = (0, 0.2], `mid` = (0.2, 1], `high` = (1, 3].
pub fn default_bands() -> Vec<Band> {
    vec![
        Band::closed("dc", 0.0, 0.0),
        Band::open_closed("low", 0.0, 0.2),
        Band::open_closed("mid", 0.2, 1.0),
        Band::open_closed("high", 1.0, 3.0),
    ]
}

/// Mean-square power per band: `A²/2` per bin (`A²` for the Nyquist bin),
/// plus `dc²` when the band contains frequency 0. Over bands covering every
/// bin and DC this sums to the series' mean square.
pub fn band_energy(spectrum: &Spectrum, bands: &[Band]) -> Result<BTreeMap<String, f64>> {
    let nyquist = spectrum.nyquist();
    let mut out = BTreeMap::new();
    for b in bands {
        if !(b.lo.is_finite() && b.hi.is_finite()) || b.lo < 0.0 || b.lo > b.hi {
            return Err(Error::Parameter(format!(
                "band `{}` [{}, {}] is not a valid interval",
                b.name, b.lo, b.hi
            )));
        }
        if b.hi > nyquist * (1.0 + 1e-12) {
            return Err(Error::Parameter(format!(
                "band `{}` reaches {} cycles/hour, beyond the Nyquist frequency {nyquist}",
                b.name, b.hi
            )));
        }
        let mut e = if b.contains(0.0) { spectrum.dc * spectrum.dc } else { 0.0 };
        for (k, &f) in spectrum.frequencies.iter().enumerate() {
            if b.contains(f) {
                e += spectrum.bin_power(k);
            }
        }
        out.insert(b.name.clone(), e);
    }
    Ok(out)
}

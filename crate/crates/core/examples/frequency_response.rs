//! Frequency-domain attribution: compare the spectrum of the model's
//! predictions with versions where MVART, or everything except MVART, is
//! replaced by its training mean.
//!
//! cargo run --release --example frequency_response

use chrono::TimeDelta;
use roomcast::dataio::{synthesize, SplitSpec, SynthConfig};
use roomcast::features::{EngineeringConfig, FeatureSelection};
use roomcast::forecast::ForecastConfig;
use roomcast::gbm::{train, Hyperparams};
use roomcast::pffra::{pffra, pffra_rolling, PffraOptions, Window};
use roomcast::pipeline::{Part, Prepared};

fn main() -> roomcast::Result<()> {
    let raw = synthesize(&SynthConfig::default())?;
    let config = EngineeringConfig::default();
    let prepared = Prepared::new(&raw, &SplitSpec::default(), &config, &FeatureSelection::parse("IOTS-MVA,MVART,Holiday")?)?;
    let train_x = prepared.design(Part::Train)?;
    let model = train(&train_x, &Hyperparams::default())?;
    let means = train_x.means();

    for part in Part::ALL {
        let r = pffra(&model, &prepared.design(part)?, "MVART", &means, &PffraOptions::default())?;
        println!(
            "{:<10} DC: original {:.3}, MVART only {:.3}, MVART at mean {:.3}, truth {:.3}",
            part.label(),
            r.spectrum_original.dc,
            r.spectrum_feature_only.dc,
            r.spectrum_feature_permuted.dc,
            r.spectrum_truth.dc
        );
        for (band, e) in &r.band_energies {
            println!(
                "           {band:<5} energy: original {:.4}, MVART only {:.4}, MVART at mean {:.4}",
                e.original, e.feature_only, e.feature_permuted
            );
        }
    }

    // The same analysis on daily re-anchored rolling forecasts, Hann-windowed.
    let opts = PffraOptions {
        window: Window::Hann,
        ..PffraOptions::default()
    };
    let r = pffra_rolling(
        &model,
        &prepared.context(Part::Test)?,
        &prepared.names,
        config.mva_window,
        &ForecastConfig::every(TimeDelta::hours(24)),
        "MVART",
        &means,
        &opts,
    )?;
    println!("rolling test forecast: MVART-only share of low-band energy {:.3}", r.feature_only_share("low").unwrap_or(f64::NAN));
    Ok(())
}

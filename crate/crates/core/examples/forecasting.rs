//! Rolling forecasts that re-anchor on observed temperature, plus the
//! forecast-horizon and MVA-window sweeps.
//!
//! cargo run --release --example forecasting

use chrono::TimeDelta;
use roomcast::dataio::{synthesize, SplitSpec, SynthConfig};
use roomcast::features::{EngineeringConfig, FeatureSelection};
use roomcast::forecast::{horizon_sweep, rolling_forecast, window_sweep, ForecastConfig, Tuning};
use roomcast::gbm::{train, Hyperparams, Regressor};
use roomcast::pipeline::{Part, Prepared};
use roomcast::stats::metrics;

fn main() -> roomcast::Result<()> {
    let raw = synthesize(&SynthConfig::default())?;
    let spec = SplitSpec::default();
    let config = EngineeringConfig::default();
    let prepared = Prepared::new(&raw, &spec, &config, &FeatureSelection::parse("IOTS-MVA,MVART,Holiday")?)?;
    let params = Hyperparams::default();
    let model = train(&prepared.design(Part::Train)?, &params)?;

    // One-step predictions see true MVART; the rolling forecast has to feed
    // its own predictions back once it leaves the anchor.
    let val_x = prepared.design(Part::Validation)?;
    let one_step = metrics(val_x.target(), &model.predict_matrix(&val_x)?)?;
    let context = prepared.context(Part::Validation)?;
    let forecast = ForecastConfig::default();
    let run = rolling_forecast(&model, &context, &prepared.names, config.mva_window, &forecast)?;
    println!(
        "validation MAE: one-step {:.4}, rolling ({} h ahead, re-anchored every {} h) {:.4} over {} rows",
        one_step.mae,
        forecast.horizon.num_hours(),
        forecast.access_interval.num_hours(),
        run.metrics()?.mae,
        run.len()
    );

    let intervals: Vec<TimeDelta> = [10, 60, 480, 1440].iter().map(|&m| TimeDelta::minutes(m)).collect();
    for row in horizon_sweep(&model, &context, &prepared.names, config.mva_window, &intervals, &forecast)? {
        println!("interval {:>5} min: MAE {:.4}", row.width_or_interval, row.metrics.mae);
    }

    let widths: Vec<TimeDelta> = [0, 60, 1440].iter().map(|&m| TimeDelta::minutes(m)).collect();
    for row in window_sweep(&raw, &spec, &config, &widths, &Tuning::Fixed(params), &forecast)? {
        println!("MVA width {:>5} min: MAE {:.4}", row.width_or_interval, row.metrics.mae);
    }
    Ok(())
}

use std::io::Write;

use chrono::TimeDelta;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::rolling::{rolling_forecast, ForecastConfig};
use crate::dataio::{SplitSpec, TimeTable};
use crate::error::{Error, Result};
use crate::features::{EngineeringConfig, FeatureGroup, FeatureSelection};
use crate::gbm::{grid_search, train, Ensemble, GridRanges, Hyperparams, Regressor};
use crate::pipeline::{Part, Prepared};
use crate::stats::MetricReport;

/// One sweep result; the swept quantity is in minutes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub width_or_interval: i64,
    pub metrics: MetricReport,
}

/// CSV with columns `width_or_interval, mse, mae, mape, r2`; an undefined
/// MAPE is left empty.
pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["width_or_interval", "mse", "mae", "mape", "r2"])?;
    for r in rows {
        w.write_record([
            r.width_or_interval.to_string(),
            r.metrics.mse.to_string(),
            r.metrics.mae.to_string(),
            r.metrics.mape.map(|m| m.to_string()).unwrap_or_default(),
            r.metrics.r2.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// How each configuration of a sweep gets its hyperparameters.
#[derive(Debug, Clone, PartialEq)]
pub enum Tuning {
    Fixed(Hyperparams),
    Grid(GridRanges),
}

impl Tuning {
    /// Trains on the training partition, grid-searching against validation
    /// when asked to.
    pub fn fit(&self, prepared: &Prepared) -> Result<Ensemble> {
        let train_x = prepared.design(Part::Train)?;
        match self {
            Tuning::Fixed(p) => train(&train_x, p),
            Tuning::Grid(g) => {
                let val_x = prepared.design(Part::Validation)?;
                Ok(grid_search(&train_x, &val_x, g)?.best_model)
            }
        }
    }
}

/// Rolling-forecast scores of one model for each interval, where the
/// interval is both how often true values arrive and how far ahead the model
/// runs.
pub fn horizon_sweep<M: Regressor + ?Sized>(
    model: &M,
    context: &TimeTable,
    names: &[String],
    window: usize,
    intervals: &[TimeDelta],
    base: &ForecastConfig,
) -> Result<Vec<SweepRow>> {
    if intervals.is_empty() {
        return Err(Error::Parameter("no intervals to sweep".into()));
    }
    intervals
        .iter()
        .map(|&iv| {
            let cfg = ForecastConfig {
                access_interval: iv,
                horizon: iv,
                ..*base
            };
            let run = rolling_forecast(model, context, names, window, &cfg)
                .map_err(|e| e.context(format!("interval of {} min", iv.num_minutes())))?;
            Ok(SweepRow {
                width_or_interval: iv.num_minutes(),
                metrics: run.metrics()?,
            })
        })
        .collect()
}

/// Engineering setup for a sweep width. Width 0 drops the historical feature
/// and uses raw outdoor signals; any other width sets the MVA window of both
/// the historical feature and the smoothed signals.
pub fn window_setup(
    width: TimeDelta,
    interval_secs: i64,
    base: &EngineeringConfig,
) -> Result<(EngineeringConfig, FeatureSelection)> {
    let secs = width.num_seconds();
    if secs < 0 || secs % interval_secs != 0 {
        return Err(Error::Config(format!(
            "window width of {secs} s is not a multiple of the {interval_secs} s sampling interval"
        )));
    }
    let steps = (secs / interval_secs) as usize;
    if steps == 0 {
        let cfg = EngineeringConfig {
            mva_window: 1,
            ..base.clone()
        };
        Ok((cfg, FeatureSelection::groups(&[FeatureGroup::Iots, FeatureGroup::Holiday])))
    } else {
        let cfg = EngineeringConfig {
            mva_window: steps,
            ..base.clone()
        };
        let sel = FeatureSelection::groups(&[
            FeatureGroup::IotsMva,
            FeatureGroup::Mvart,
            FeatureGroup::Holiday,
        ]);
        Ok((cfg, sel))
    }
}

/// Trains one model per MVA width and scores its rolling forecast on the
/// validation partition.
pub fn window_sweep(
    raw: &TimeTable,
    spec: &SplitSpec,
    base: &EngineeringConfig,
    widths: &[TimeDelta],
    tuning: &Tuning,
    forecast: &ForecastConfig,
) -> Result<Vec<SweepRow>> {
    if widths.is_empty() {
        return Err(Error::Parameter("no window widths to sweep".into()));
    }
    widths
        .par_iter()
        .map(|&width| {
            let label = || format!("window width {} min", width.num_minutes());
            let (cfg, sel) = window_setup(width, raw.interval_secs(), base)?;
            let prepared = Prepared::new(raw, spec, &cfg, &sel).map_err(|e| e.context(label()))?;
            let model = tuning.fit(&prepared).map_err(|e| e.context(label()))?;
            let run = rolling_forecast(
                &model,
                &prepared.context(Part::Validation)?,
                &prepared.names,
                cfg.mva_window,
                forecast,
            )
            .map_err(|e| e.context(label()))?;
            Ok(SweepRow {
                width_or_interval: width.num_minutes(),
                metrics: run.metrics()?,
            })
        })
        .collect()
}

use std::io::Write;

use chrono::{DateTime, TimeDelta, Timelike, Utc};
use serde::{Deserialize, Serialize};

use crate::calendar::{local_time, DEFAULT_UTC_OFFSET_HOURS};
use crate::columns;
use crate::dataio::TimeTable;
use crate::error::{Error, Result};
use crate::features::{matrix_from_table, window_mean};
use crate::gbm::{check_width, Regressor};
use crate::stats::{metrics, MetricReport};

/// How often true room temperature is observed and how far ahead the model
/// runs on its own predictions after each observation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForecastConfig {
    pub access_interval: TimeDelta,
    pub horizon: TimeDelta,
    /// Local hour of the first anchor of each run.
    pub anchor_hour: u32,
    pub utc_offset_hours: i32,
}

impl Default for ForecastConfig {
    fn default() -> Self {
        ForecastConfig {
            access_interval: TimeDelta::hours(24),
            horizon: TimeDelta::hours(8),
            anchor_hour: 0,
            utc_offset_hours: DEFAULT_UTC_OFFSET_HOURS,
        }
    }
}

impl ForecastConfig {
    /// Access interval and horizon both equal to `interval`, so every step
    /// between anchors is predicted and scored.
    pub fn every(interval: TimeDelta) -> Self {
        ForecastConfig {
            access_interval: interval,
            horizon: interval,
            ..ForecastConfig::default()
        }
    }

    fn steps(d: TimeDelta, interval_secs: i64, what: &str) -> Result<usize> {
        let secs = d.num_seconds();
        if secs <= 0 || secs % interval_secs != 0 {
            return Err(Error::Config(format!(
                "{what} of {secs} s is not a positive multiple of the {interval_secs} s sampling interval"
            )));
        }
        Ok((secs / interval_secs) as usize)
    }

    /// `(access_steps, horizon_steps)` for a grid with the given spacing.
    pub fn to_steps(&self, interval_secs: i64) -> Result<(usize, usize)> {
        let access = Self::steps(self.access_interval, interval_secs, "access interval")?;
        let horizon = Self::steps(self.horizon, interval_secs, "horizon")?;
        if horizon > access {
            return Err(Error::Config(format!(
                "horizon ({horizon} steps) exceeds the access interval ({access} steps)"
            )));
        }
        if self.anchor_hour > 23 {
            return Err(Error::Config(format!("anchor hour {} is not 0-23", self.anchor_hour)));
        }
        Ok((access, horizon))
    }
}

/// Scored predictions of one rolling forecast.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForecastRun {
    pub access_steps: usize,
    pub horizon_steps: usize,
    /// Instants whose true value was consumed, one per anchor id.
    pub anchors: Vec<DateTime<Utc>>,
    pub timestamps: Vec<DateTime<Utc>>,
    pub y_true: Vec<f64>,
    pub y_pred: Vec<f64>,
    pub anchor_id: Vec<usize>,
    /// Feature rows the model was evaluated on, MVART included as fed back.
    pub inputs: Vec<Vec<f64>>,
}

impl ForecastRun {
    pub fn len(&self) -> usize {
        self.y_true.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y_true.is_empty()
    }

    pub fn metrics(&self) -> Result<MetricReport> {
        metrics(&self.y_true, &self.y_pred)
    }

    pub fn residuals(&self) -> Vec<f64> {
        self.y_true.iter().zip(&self.y_pred).map(|(t, p)| t - p).collect()
    }

    /// CSV with columns `timestamp, y_true, y_pred, anchor_id`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["timestamp", "y_true", "y_pred", "anchor_id"])?;
        for i in 0..self.len() {
            w.write_record([
                self.timestamps[i].format("%Y-%m-%dT%H:%M:%SZ").to_string(),
                self.y_true[i].to_string(),
                self.y_pred[i].to_string(),
                self.anchor_id[i].to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Row indices where true room temperature is consumed: the first row at
/// the anchor hour with `window` rows of history, then every `access` steps.
pub fn anchor_rows(table: &TimeTable, window: usize, access: usize, cfg: &ForecastConfig) -> Vec<usize> {
    let first = (window.saturating_sub(1)..table.len()).find(|&i| {
        let t = local_time(table.timestamps()[i], cfg.utc_offset_hours);
        t.hour() == cfg.anchor_hour && t.minute() == 0 && t.second() == 0
    });
    match first {
        Some(a) => (a..table.len().saturating_sub(1)).step_by(access).collect(),
        None => Vec::new(),
    }
}

/// Recursive multi-step forecast over an engineered table.
///
/// At each anchor the MVART buffer is reset from true room temperature up to
/// and including the anchor row. The model then predicts the following
/// `horizon` rows one at a time, feeding each prediction back into the buffer.
/// Other inputs are read from the table as a known scenario. When `names`
/// has no MVART column the model is simply evaluated on those rows.
pub fn rolling_forecast<M: Regressor + ?Sized>(
    model: &M,
    table: &TimeTable,
    names: &[String],
    window: usize,
    cfg: &ForecastConfig,
) -> Result<ForecastRun> {
    rolling_forecast_substituted(model, table, names, window, cfg, &[])
}

/// [`rolling_forecast`] with some input columns pinned to fixed values.
///
/// `substitutions` holds `(column index, value)` pairs applied to the row the
/// model sees. The MVART recursion still carries the model's own
/// predictions when MVART itself is pinned.
pub fn rolling_forecast_substituted<M: Regressor + ?Sized>(
    model: &M,
    table: &TimeTable,
    names: &[String],
    window: usize,
    cfg: &ForecastConfig,
    substitutions: &[(usize, f64)],
) -> Result<ForecastRun> {
    check_width(model.n_features(), names.len())?;
    if window < 1 {
        return Err(Error::Parameter("MVART window must be at least 1".into()));
    }
    if let Some(&(j, _)) = substitutions.iter().find(|s| s.0 >= names.len()) {
        return Err(Error::Input(format!("substitution column {j} is out of range")));
    }
    let (access, horizon) = cfg.to_steps(table.interval_secs())?;
    let x = matrix_from_table(table, names, 0)?;
    let mvart = names.iter().position(|n| n == columns::MVART);
    let truth = table.target();
    let anchors = anchor_rows(table, window, access, cfg);
    if anchors.is_empty() {
        return Err(Error::Input(format!(
            "table has no anchor at local hour {} with {window} rows of history",
            cfg.anchor_hour
        )));
    }

    let mut run = ForecastRun {
        access_steps: access,
        horizon_steps: horizon,
        anchors: anchors.iter().map(|&a| table.timestamps()[a]).collect(),
        timestamps: Vec::new(),
        y_true: Vec::new(),
        y_pred: Vec::new(),
        anchor_id: Vec::new(),
        inputs: Vec::new(),
    };
    let mut buf: Vec<f64> = Vec::with_capacity(window + horizon);
    let mut row = vec![0.0; names.len()];
    for (id, &a) in anchors.iter().enumerate() {
        buf.clear();
        buf.extend_from_slice(&truth[a + 1 - window..=a]);
        for t in a + 1..=(a + horizon).min(table.len() - 1) {
            row.copy_from_slice(x.row(t));
            if let Some(j) = mvart {
                row[j] = window_mean(&buf[buf.len() - window..]);
            }
            for &(j, v) in substitutions {
                row[j] = v;
            }
            if let Some(j) = row.iter().position(|v| !v.is_finite()) {
                return Err(Error::Input(format!(
                    "feature `{}` is not finite at {}",
                    names[j],
                    table.timestamps()[t].to_rfc3339()
                )));
            }
            let p = model.predict_row(&row);
            buf.push(p);
            run.timestamps.push(table.timestamps()[t]);
            run.y_true.push(truth[t]);
            run.y_pred.push(p);
            run.anchor_id.push(id);
            run.inputs.push(row.clone());
        }
    }
    Ok(run)
}

/// `part` extended backwards by up to `rows` rows of `full`, so features and
/// anchors at the start of a split can use earlier history.
pub fn with_history(full: &TimeTable, part: &TimeTable, rows: usize) -> Result<TimeTable> {
    let first = part
        .timestamps()
        .first()
        .ok_or_else(|| Error::Input("empty partition".into()))?;
    let start = full
        .index_of(*first)
        .ok_or_else(|| Error::Input("partition is not part of the full table".into()))?;
    Ok(full.slice(start.saturating_sub(rows)..start + part.len()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataio::{synthesize, SynthConfig};
    use crate::features::{
        build_design_matrix, engineer, mvart_series, EngineeringConfig, FeatureSelection, MvartSource,
    };
    use crate::gbm::{train, Ensemble, Hyperparams};

    /// Echoes one input column, exposing what the forecaster fed the model.
    struct Echo {
        width: usize,
        column: usize,
    }

    impl Regressor for Echo {
        fn n_features(&self) -> usize {
            self.width
        }
        fn predict_row(&self, row: &[f64]) -> f64 {
            row[self.column] - 0.25
        }
    }

    fn setup(days: u32) -> (TimeTable, EngineeringConfig, Vec<String>) {
        let cfg = EngineeringConfig::default();
        let raw = synthesize(&SynthConfig {
            n_days: days,
            ..SynthConfig::default()
        })
        .unwrap();
        let t = engineer(&raw, &cfg).unwrap();
        let names = FeatureSelection::parse("IOTS-MVA,MVART,Holiday").unwrap().resolve().unwrap();
        (t, cfg, names)
    }

    fn minutes(m: i64) -> TimeDelta {
        TimeDelta::minutes(m)
    }

    fn model(t: &TimeTable, cfg: &EngineeringConfig) -> Ensemble {
        let sel = FeatureSelection::parse("IOTS-MVA,MVART,Holiday").unwrap();
        let x = build_design_matrix(t, cfg, &sel).unwrap();
        train(&x, &Hyperparams { n_trees: 20, max_depth: 4, ..Hyperparams::default() }).unwrap()
    }

    #[test]
    fn one_step_matches_oracle_predictions() {
        let (t, cfg, names) = setup(4);
        let m = model(&t, &cfg);
        let run = rolling_forecast(&m, &t, &names, 6, &ForecastConfig::every(minutes(10))).unwrap();
        let x = build_design_matrix(&t, &cfg, &FeatureSelection::parse("IOTS-MVA,MVART,Holiday").unwrap()).unwrap();
        let oracle = m.predict_matrix(&x).unwrap();
        // The first anchor is the first local midnight with history.
        let first = x.timestamps().iter().position(|ts| *ts == run.timestamps[0]).unwrap();
        assert_eq!(run.len(), x.n_rows() - first);
        for (i, p) in run.y_pred.iter().enumerate() {
            assert_eq!(p.to_bits(), oracle[first + i].to_bits());
        }
    }

    #[test]
    fn constant_model_predicts_base_score() {
        let (t, _, names) = setup(3);
        let m = Ensemble::constant(23.0, names.clone());
        let run = rolling_forecast(&m, &t, &names, 6, &ForecastConfig::default()).unwrap();
        assert!(run.y_pred.iter().all(|&p| p == 23.0));
    }

    #[test]
    fn scored_count_and_anchor_spacing() {
        let (t, _, names) = setup(5);
        let m = Ensemble::constant(23.0, names.clone());
        let cfg = ForecastConfig::default();
        let run = rolling_forecast(&m, &t, &names, 6, &cfg).unwrap();
        let anchors = anchor_rows(&t, 6, 144, &cfg);
        let expected: usize = anchors.iter().map(|&a| 48.min(t.len() - 1 - a)).sum();
        assert_eq!(run.len(), expected);
        for w in run.anchors.windows(2) {
            assert_eq!(w[1] - w[0], TimeDelta::hours(24));
        }
        // Scored instants lie within (anchor, anchor + 8 h].
        for (ts, &id) in run.timestamps.iter().zip(&run.anchor_id) {
            let d = *ts - run.anchors[id];
            assert!(d > TimeDelta::zero() && d <= TimeDelta::hours(8));
        }
    }

    #[test]
    fn mvart_recursion_matches_feature_module() {
        let (t, _, names) = setup(4);
        let j = names.iter().position(|n| n == columns::MVART).unwrap();
        let echo = Echo { width: names.len(), column: j };
        let cfg = ForecastConfig::every(minutes(180));
        let run = rolling_forecast(&echo, &t, &names, 6, &cfg).unwrap();
        let mut preds = vec![f64::NAN; t.len()];
        for (ts, p) in run.timestamps.iter().zip(&run.y_pred) {
            preds[t.index_of(*ts).unwrap()] = *p;
        }
        let anchors = anchor_rows(&t, 6, 18, &cfg);
        // Rows before the first anchor are known truth for the reference.
        let filled: Vec<f64> = preds
            .iter()
            .zip(t.target())
            .map(|(p, y)| if p.is_nan() { *y } else { *p })
            .collect();
        let reference = mvart_series(
            t.target(),
            6,
            MvartSource::Rolling { predictions: &filled, anchors: &anchors },
        )
        .unwrap();
        for (ts, p) in run.timestamps.iter().zip(&run.y_pred) {
            let i = t.index_of(*ts).unwrap();
            assert_eq!(*p + 0.25, reference[i]);
        }
    }

    #[test]
    fn no_look_ahead_past_the_anchor() {
        let (t, cfg, names) = setup(5);
        let m = model(&t, &cfg);
        let fc = ForecastConfig::default();
        let run = rolling_forecast(&m, &t, &names, 6, &fc).unwrap();
        let k = 2;
        let cut = t.index_of(run.anchors[k]).unwrap();
        let mut rt = t.target().to_vec();
        for v in &mut rt[cut + 1..] {
            *v += 7.0;
        }
        let mut cols = t.columns().clone();
        let mut mvart = cols.remove(columns::MVART).unwrap();
        for v in &mut mvart[cut + 1..] {
            *v = -100.0;
        }
        let tampered = TimeTable::new(t.timestamps().to_vec(), cols, rt, t.interval_secs())
            .unwrap()
            .with_column(columns::MVART, mvart)
            .unwrap();
        let again = rolling_forecast(&m, &tampered, &names, 6, &fc).unwrap();
        for i in 0..run.len() {
            if run.anchor_id[i] <= k {
                assert_eq!(run.y_pred[i], again.y_pred[i]);
            }
        }
    }

    #[test]
    fn horizon_beyond_access_is_a_config_error() {
        let (t, _, names) = setup(2);
        let m = Ensemble::constant(1.0, names.clone());
        let cfg = ForecastConfig {
            access_interval: TimeDelta::hours(1),
            horizon: TimeDelta::hours(2),
            ..ForecastConfig::default()
        };
        let e = rolling_forecast(&m, &t, &names, 6, &cfg).unwrap_err();
        assert!(matches!(e, Error::Config(_)));
        let odd = ForecastConfig::every(minutes(15));
        assert!(matches!(rolling_forecast(&m, &t, &names, 6, &odd), Err(Error::Config(_))));
    }

    #[test]
    fn width_mismatch_is_an_input_error() {
        let (t, _, names) = setup(2);
        let m = Ensemble::constant(1.0, vec!["a".into()]);
        assert!(matches!(
            rolling_forecast(&m, &t, &names, 6, &ForecastConfig::default()),
            Err(Error::Input(_))
        ));
    }

    #[test]
    fn csv_has_fixed_header() {
        let (t, _, names) = setup(2);
        let m = Ensemble::constant(21.0, names.clone());
        let run = rolling_forecast(&m, &t, &names, 6, &ForecastConfig::default()).unwrap();
        let mut out = Vec::new();
        run.write_csv(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.starts_with("timestamp,y_true,y_pred,anchor_id\n"));
        assert_eq!(text.lines().count(), run.len() + 1);
    }
}

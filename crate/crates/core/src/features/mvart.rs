//! The historical room-temperature feature: a trailing mean of strictly
//! past values.

use super::mva::window_mean;
use crate::columns;
use crate::dataio::TimeTable;
use crate::error::{Error, Result};

/// Where the values inside the MVART window come from.
#[derive(Debug, Clone, Copy)]
pub enum MvartSource<'a> {
    /// True room temperature throughout.
    Oracle,
    /// True values up to and including the most recent anchor, the model's
    /// own predictions after it. `predictions` is aligned with table rows;
    /// `anchors` are sorted row indices where the true value was observed.
    Rolling {
        predictions: &'a [f64],
        anchors: &'a [usize],
    },
}

/// MVART value for every row; rows without `window` samples of history are NaN.
pub fn mvart_series(truth: &[f64], window: usize, source: MvartSource<'_>) -> Result<Vec<f64>> {
    if window == 0 {
        return Err(Error::Parameter("MVART window must be at least 1".into()));
    }
    let (predictions, anchors) = match source {
        MvartSource::Oracle => return Ok(oracle(truth, window)),
        MvartSource::Rolling {
            predictions,
            anchors,
        } => (predictions, anchors),
    };
    let n = truth.len();
    if predictions.len() != n {
        return Err(Error::Input(format!(
            "{} predictions for {n} rows",
            predictions.len()
        )));
    }
    if anchors.windows(2).any(|p| p[1] <= p[0]) || anchors.iter().any(|&a| a >= n) {
        return Err(Error::Input("anchors must be increasing row indices".into()));
    }
    let mut out = vec![f64::NAN; n];
    let mut buf = Vec::with_capacity(window);
    for t in window..n {
        // Governing anchor: the latest one strictly before t.
        let pos = anchors.partition_point(|&a| a < t);
        let anchor = pos.checked_sub(1).map(|k| anchors[k]);
        buf.clear();
        for i in t - window..t {
            let known = anchor.is_none_or(|a| i <= a);
            let v = if known { truth[i] } else { predictions[i] };
            if !v.is_finite() {
                return Err(Error::Input(format!(
                    "no prediction supplied for row {i} after anchor"
                )));
            }
            buf.push(v);
        }
        out[t] = window_mean(&buf);
    }
    Ok(out)
}

fn oracle(truth: &[f64], window: usize) -> Vec<f64> {
    (0..truth.len())
        .map(|t| {
            if t < window {
                f64::NAN
            } else {
                window_mean(&truth[t - window..t])
            }
        })
        .collect()
}

/// Adds the MVART column. Warm-up rows (fewer than `window` past samples)
/// hold NaN and are dropped by the design-matrix builder.
pub fn add_mvart(table: &TimeTable, window: usize, source: MvartSource<'_>) -> Result<TimeTable> {
    let values = mvart_series(table.target(), window, source)?;
    table.with_column(columns::MVART, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn oracle_uses_strictly_past_values() {
        let rt = [20.0, 21.0, 22.0, 23.0, 24.0, 25.0, 26.0];
        let m = mvart_series(&rt, 6, MvartSource::Oracle).unwrap();
        assert!(m[..6].iter().all(|v| v.is_nan()));
        assert_eq!(m[6], 22.5);
    }

    #[test]
    fn constant_series_gives_constant_feature() {
        let m = mvart_series(&[22.0; 30], 6, MvartSource::Oracle).unwrap();
        assert!(m[6..].iter().all(|&v| v == 22.0));
    }

    #[test]
    fn rolling_with_perfect_predictions_matches_oracle() {
        let rt: Vec<f64> = (0..50).map(|i| 20.0 + (i as f64 * 0.3).sin()).collect();
        let anchors = [5, 20, 35];
        let rolled = mvart_series(
            &rt,
            6,
            MvartSource::Rolling {
                predictions: &rt,
                anchors: &anchors,
            },
        )
        .unwrap();
        let oracle = mvart_series(&rt, 6, MvartSource::Oracle).unwrap();
        for (a, b) in rolled.iter().zip(&oracle) {
            assert!(a == b || (a.is_nan() && b.is_nan()));
        }
    }

    #[test]
    fn rolling_mixes_truth_and_predictions() {
        let rt = [1.0, 1.0, 1.0, 1.0, 1.0, 1.0];
        let preds = [9.0, 9.0, 9.0, 3.0, 5.0, 9.0];
        let m = mvart_series(
            &rt,
            2,
            MvartSource::Rolling {
                predictions: &preds,
                anchors: &[2],
            },
        )
        .unwrap();
        // Row 3: history rows 1, 2 (both at/before anchor) -> truth.
        assert_eq!(m[3], 1.0);
        // Row 4: row 2 true, row 3 predicted.
        assert_eq!(m[4], 2.0);
        // Row 5: rows 3 and 4 predicted.
        assert_eq!(m[5], 4.0);
    }

    #[test]
    fn missing_prediction_is_an_error() {
        let rt = [1.0; 6];
        let preds = [f64::NAN; 6];
        let r = mvart_series(
            &rt,
            2,
            MvartSource::Rolling {
                predictions: &preds,
                anchors: &[1],
            },
        );
        assert!(r.is_err());
    }

    proptest! {
        #[test]
        fn no_look_ahead(
            rt in prop::collection::vec(10.0f64..35.0, 10..60),
            w in 1usize..8,
            at in 0usize..60,
            bump in -5.0f64..5.0,
        ) {
            let at = at % rt.len();
            let base = mvart_series(&rt, w, MvartSource::Oracle).unwrap();
            let mut changed = rt.clone();
            changed[at] += bump;
            let after = mvart_series(&changed, w, MvartSource::Oracle).unwrap();
            for t in 0..=at {
                prop_assert!(base[t] == after[t] || (base[t].is_nan() && after[t].is_nan()));
            }
        }
    }
}

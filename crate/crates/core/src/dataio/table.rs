use std::collections::BTreeMap;
use std::ops::Range;

use chrono::{DateTime, Utc};

use crate::error::{Error, Result};

/// Name of the target column in CSV output.
pub const TARGET_COLUMN: &str = "RT";

/// Default sampling interval: ten minutes.
pub const DEFAULT_INTERVAL_SECS: i64 = 600;

/// Uniformly sampled, timestamp-indexed table of named feature columns plus
/// the room-temperature target.
///
/// Timestamps are UTC instants with constant spacing. Columns are kept in
/// name order so that every serialization of a table is deterministic.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeTable {
    timestamps: Vec<DateTime<Utc>>,
    columns: BTreeMap<String, Vec<f64>>,
    target: Vec<f64>,
    interval_secs: i64,
}

impl TimeTable {
    /// Builds a table, checking spacing, lengths and that every value is finite.
    pub fn new(
        timestamps: Vec<DateTime<Utc>>,
        columns: BTreeMap<String, Vec<f64>>,
        target: Vec<f64>,
        interval_secs: i64,
    ) -> Result<Self> {
        if interval_secs <= 0 {
            return Err(Error::Parameter(format!(
                "sampling interval must be positive, got {interval_secs}s"
            )));
        }
        check_spacing(&timestamps, interval_secs)?;
        if target.len() != timestamps.len() {
            return Err(Error::Integrity(format!(
                "target has {} values for {} timestamps",
                target.len(),
                timestamps.len()
            )));
        }
        if let Some(i) = target.iter().position(|v| !v.is_finite()) {
            return Err(Error::Integrity(format!(
                "target value at {} is missing or non-finite",
                timestamps[i].to_rfc3339()
            )));
        }
        for (name, values) in &columns {
            if name == TARGET_COLUMN {
                return Err(Error::Schema(format!(
                    "feature column may not be named `{TARGET_COLUMN}`"
                )));
            }
            if values.len() != timestamps.len() {
                return Err(Error::Integrity(format!(
                    "column `{name}` has {} values for {} timestamps",
                    values.len(),
                    timestamps.len()
                )));
            }
            if let Some(i) = values.iter().position(|v| !v.is_finite()) {
                return Err(Error::Integrity(format!(
                    "column `{name}` is missing a value at {}",
                    timestamps[i].to_rfc3339()
                )));
            }
        }
        Ok(TimeTable {
            timestamps,
            columns,
            target,
            interval_secs,
        })
    }

    pub fn len(&self) -> usize {
        self.timestamps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.timestamps.is_empty()
    }

    pub fn timestamps(&self) -> &[DateTime<Utc>] {
        &self.timestamps
    }

    pub fn target(&self) -> &[f64] {
        &self.target
    }

    pub fn interval_secs(&self) -> i64 {
        self.interval_secs
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.columns.get(name).map(Vec::as_slice)
    }

    /// Like [`TimeTable::column`] but reports a pipeline error naming the column.
    pub fn require(&self, name: &str) -> Result<&[f64]> {
        self.column(name)
            .ok_or_else(|| Error::Pipeline(format!("required column `{name}` is missing")))
    }

    pub fn column_names(&self) -> impl Iterator<Item = &str> {
        self.columns.keys().map(String::as_str)
    }

    pub fn columns(&self) -> &BTreeMap<String, Vec<f64>> {
        &self.columns
    }

    /// Returns a copy with `name` added or replaced.
    ///
    /// Engineered columns may carry NaN for rows without enough history; those
    /// rows are dropped when a design matrix is built.
    pub fn with_column(&self, name: &str, values: Vec<f64>) -> Result<TimeTable> {
        if values.len() != self.len() {
            return Err(Error::Integrity(format!(
                "column `{name}` has {} values for {} rows",
                values.len(),
                self.len()
            )));
        }
        if name == TARGET_COLUMN {
            return Err(Error::Schema(format!(
                "feature column may not be named `{TARGET_COLUMN}`"
            )));
        }
        let mut out = self.clone();
        out.columns.insert(name.to_string(), values);
        Ok(out)
    }

    pub fn without_column(&self, name: &str) -> TimeTable {
        let mut out = self.clone();
        out.columns.remove(name);
        out
    }

    /// Contiguous row range as a new table.
    pub fn slice(&self, range: Range<usize>) -> TimeTable {
        TimeTable {
            timestamps: self.timestamps[range.clone()].to_vec(),
            columns: self
                .columns
                .iter()
                .map(|(k, v)| (k.clone(), v[range.clone()].to_vec()))
                .collect(),
            target: self.target[range].to_vec(),
            interval_secs: self.interval_secs,
        }
    }

    /// Concatenates tables that continue each other on the same grid.
    pub fn concat(parts: &[TimeTable]) -> Result<TimeTable> {
        let first = parts
            .first()
            .ok_or_else(|| Error::Parameter("nothing to concatenate".into()))?;
        let mut out = first.clone();
        for part in &parts[1..] {
            if part.interval_secs != out.interval_secs {
                return Err(Error::Integrity("tables use different sampling intervals".into()));
            }
            let names_a: Vec<_> = out.column_names().collect();
            let names_b: Vec<_> = part.column_names().collect();
            if names_a != names_b {
                return Err(Error::Integrity("tables have different columns".into()));
            }
            out.timestamps.extend_from_slice(&part.timestamps);
            out.target.extend_from_slice(&part.target);
            for (name, values) in out.columns.iter_mut() {
                values.extend_from_slice(&part.columns[name]);
            }
        }
        check_spacing(&out.timestamps, out.interval_secs)?;
        Ok(out)
    }

    /// Index of `ts` on the grid, if present.
    pub fn index_of(&self, ts: DateTime<Utc>) -> Option<usize> {
        self.timestamps.binary_search(&ts).ok()
    }
}

fn check_spacing(timestamps: &[DateTime<Utc>], interval_secs: i64) -> Result<()> {
    for pair in timestamps.windows(2) {
        let step = (pair[1] - pair[0]).num_seconds();
        if step == 0 {
            return Err(Error::Integrity(format!(
                "duplicate timestamp {}",
                pair[0].to_rfc3339()
            )));
        }
        if step != interval_secs {
            return Err(Error::Integrity(format!(
                "timestamps {} and {} are {step}s apart, expected {interval_secs}s \
                 (gaps must be filled before ingestion)",
                pair[0].to_rfc3339(),
                pair[1].to_rfc3339()
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::TimeZone;

    fn grid(n: usize) -> Vec<DateTime<Utc>> {
        let t0 = Utc.with_ymd_and_hms(2019, 1, 1, 0, 0, 0).unwrap();
        (0..n)
            .map(|i| t0 + chrono::Duration::minutes(10 * i as i64))
            .collect()
    }

    #[test]
    fn rejects_irregular_spacing() {
        let mut ts = grid(3);
        ts[2] += chrono::Duration::minutes(10);
        let err = TimeTable::new(ts, BTreeMap::new(), vec![1.0; 3], 600).unwrap_err();
        assert!(matches!(err, Error::Integrity(_)));
    }

    #[test]
    fn rejects_length_mismatch_and_nan() {
        let mut cols = BTreeMap::new();
        cols.insert("a".to_string(), vec![1.0, 2.0]);
        assert!(TimeTable::new(grid(3), cols, vec![1.0; 3], 600).is_err());
        assert!(TimeTable::new(grid(2), BTreeMap::new(), vec![1.0, f64::NAN], 600).is_err());
    }

    #[test]
    fn slice_and_concat_round_trip() {
        let mut cols = BTreeMap::new();
        cols.insert("a".to_string(), (0..6).map(f64::from).collect());
        let t = TimeTable::new(grid(6), cols, (0..6).map(f64::from).collect(), 600).unwrap();
        let parts = [t.slice(0..2), t.slice(2..5), t.slice(5..6)];
        assert_eq!(TimeTable::concat(&parts).unwrap(), t);
        assert!(TimeTable::concat(&[t.slice(0..2), t.slice(3..6)]).is_err());
    }
}
